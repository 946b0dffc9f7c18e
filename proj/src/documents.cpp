#include "fperturb/documents.hpp"

#include <cmath>
#include <string>

namespace fperturb {

namespace {

constexpr double kQuarter = 0.25;
constexpr double kHalf = 0.5;

Document bound_table(std::string title) {
  Document doc;
  doc.title = std::move(title);
  doc.columns = {"quantity", "value", "condition_value", "threshold", "applicable"};
  return doc;
}

// Plain quantity with no applicability condition.
void quantity(Document& doc, std::string name, double value) {
  doc.add_row({Cell::text(std::move(name)), Cell::number(value, NumberFormat::Full), Cell::missing(), Cell::missing(),
               Cell::missing()});
}

void bound(Document& doc, std::string name, const std::optional<double>& value, double condition, double threshold,
           bool applicable) {
  doc.add_row({Cell::text(std::move(name)), applicable ? Cell::maybe(value, NumberFormat::Full) : Cell::missing(),
               Cell::number(condition, NumberFormat::Full), Cell::number(threshold, NumberFormat::Full),
               Cell::flag(applicable)});
}

std::string_view kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::Rigorous:
      return "rigorous";
    case BoundKind::FirstOrder:
      return "first_order";
    case BoundKind::Comparison:
      return "comparison";
  }
  return "unknown";
}

}  // namespace

Document lu_normwise_document(const LuNormwiseReport& r) {
  Document doc = bound_table("Normwise LU bounds");
  doc.config["delta"] = r.delta;
  quantity(doc, "norm_Y_L", r.yl_norm);
  quantity(doc, "norm_Y_U", r.yu_norm);
  const double c = r.condition_value;
  bound(doc, "rigorous_dl", r.rigorous_dl, c, kQuarter, r.applicable);
  bound(doc, "rigorous_du", r.rigorous_du, c, kQuarter, r.applicable);
  bound(doc, "relaxed_dl", r.relaxed_dl, c, kQuarter, r.applicable);
  bound(doc, "relaxed_du", r.relaxed_du, c, kQuarter, r.applicable);
  bound(doc, "relaxed_dl_explicit", r.relaxed_dl_explicit, c, kQuarter, r.applicable);
  bound(doc, "relaxed_du_explicit", r.relaxed_du_explicit, c, kQuarter, r.applicable);
  bound(doc, "first_order_dl", r.first_order_dl, r.fo_condition_value, 1.0, r.first_order_applicable);
  bound(doc, "first_order_du", r.first_order_du, r.fo_condition_value, 1.0, r.first_order_applicable);
  const ChangStehleLuBounds& cs = r.comparison;
  bound(doc, "comparison_dl", cs.bound_dl, cs.condition_value, kQuarter, cs.applicable);
  bound(doc, "comparison_du", cs.bound_du, cs.condition_value, kQuarter, cs.applicable);
  return doc;
}

Document lu_componentwise_document(const LuComponentwiseReport& r) {
  Document doc = bound_table("Componentwise LU bounds");
  doc.config["epsilon"] = r.epsilon;
  for (auto [name, v] : {std::pair{"a", r.a}, {"b", r.b}, {"c", r.c}, {"norm_abs_Y_L", r.yl_abs_norm},
                         {"norm_abs_Y_U", r.yu_abs_norm}, {"tau", r.tau}})
    quantity(doc, name, v);
  // |c eps| < 1 and (1 - c eps)^2 - 4 a || |Y_U~| || eps > 0; the second margin is the reported value.
  const double disc = (1.0 - r.tau) * (1.0 - r.tau) - 4.0 * r.a * r.yu_abs_norm * r.epsilon;
  const double margin = std::abs(r.tau) < 1.0 ? -disc : std::abs(r.tau);
  bound(doc, "rigorous_dl", r.rigorous_dl, margin, 0.0, r.applicable);
  bound(doc, "rigorous_du", r.rigorous_du, margin, 0.0, r.applicable);
  bound(doc, "relaxed_dl", r.relaxed_dl, margin, 0.0, r.applicable);
  bound(doc, "relaxed_du", r.relaxed_du, margin, 0.0, r.applicable);
  const double fo = r.fo_condition_value;
  const bool fo_ok = r.first_order_applicable;
  for (auto [name, v] : {std::pair{"first_order_dl_F", r.first_order_dl_F}, {"first_order_du_F", r.first_order_du_F},
                         {"first_order_dl_M", r.first_order_dl_M}, {"first_order_du_M", r.first_order_du_M},
                         {"first_order_dl_S", r.first_order_dl_S}, {"first_order_du_S", r.first_order_du_S},
                         {"previous_first_order_dl_F", r.chang_first_order_dl_F},
                         {"previous_first_order_du_F", r.chang_first_order_du_F},
                         {"previous_first_order_dl_S", r.chang_first_order_dl_S},
                         {"previous_first_order_du_S", r.chang_first_order_du_S}})
    bound(doc, name, v, fo, 1.0, fo_ok);
  bound(doc, "gamma_L", r.gamma_L, margin, 0.0, r.applicable);
  bound(doc, "gamma_U", r.gamma_U, margin, 0.0, r.applicable);
  for (auto [name, v] : {std::pair{"gamma_L(D_L)", r.gamma_L_D}, {"gamma_U(D_U)", r.gamma_U_D},
                         {"eta_D_L", r.eta_DL}, {"eta_D_U", r.eta_DU}})
    quantity(doc, name, v);
  const double cc = r.comparison_condition_value;
  bound(doc, "comparison_dl", r.comparison_dl, cc, kQuarter, r.comparison_applicable);
  bound(doc, "comparison_du", r.comparison_du, cc, kQuarter, r.comparison_applicable);
  return doc;
}

Document qr_normwise_document(const QrNormwiseReport& r) {
  Document doc = bound_table("Normwise QR bounds");
  doc.config["delta1"] = r.delta1;
  doc.config["delta2"] = r.delta2;
  quantity(doc, "norm_G_R", r.gr_norm);
  quantity(doc, "norm_H_R", r.hr_norm);
  bound(doc, "rigorous_dr", r.rigorous_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "relaxed_dr", r.relaxed_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "simple_dr", r.simple_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "strengthened_condition", std::nullopt, r.strengthened_condition_value, kHalf,
        r.strengthened_applicable);
  bound(doc, "first_order_dr", r.first_order_dr, r.fo_condition_value, 1.0, r.first_order_applicable);
  for (const ChangStehleQrBound& b : r.comparisons)
    bound(doc, "comparison_dr_" + b.name, b.bound, b.condition_value, kChangStehleLimit, b.applicable);
  return doc;
}

Document qr_componentwise_document(const QrComponentwiseReport& r) {
  Document doc = bound_table("Componentwise QR bounds");
  doc.config["epsilon"] = r.epsilon;
  for (auto [name, v] : {std::pair{"a", r.a_t}, {"b", r.b_t}, {"c", r.c_t}, {"q", r.q_ratio}})
    quantity(doc, name, v);
  bound(doc, "rigorous_dr", r.rigorous_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "relaxed_dr", r.relaxed_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "simple_dr", r.simple_dr, r.condition_value, kQuarter, r.applicable);
  bound(doc, "strengthened_condition", std::nullopt, r.strengthened_value, kHalf, r.strengthened_applicable);
  bound(doc, "first_order_dr", r.first_order_dr, r.fo_condition_value, 1.0, r.first_order_applicable);
  quantity(doc, "gamma_R", r.gamma_R);
  for (const QrScaledQuantities& s : r.scaled) {
    quantity(doc, "gamma_R(" + s.name + ")", s.gamma);
    quantity(doc, "eta_" + s.name, s.eta);
    bound(doc, "comparison_dr_" + s.name, s.comparison_dr, r.comparison_condition_value, kChangStehleLimit,
          r.comparison_applicable);
  }
  return doc;
}

Document verification_document(const VerificationReport& v, const std::vector<FirstOrderTrend>& trends,
                               bool deterministic) {
  Document doc;
  doc.title = "Monte Carlo verification: " + std::string(experiment_name(v.experiment));
  doc.columns = {"check", "kind", "size", "checked", "violations", "max_ratio", "condition_value", "applicable"};
  doc.config["experiment"] = std::string(experiment_name(v.experiment));
  doc.config["size"] = v.size;
  doc.config["trials"] = v.trials;
  for (const BoundCheck& c : v.checks) {
    doc.add_row({Cell::text(c.name), Cell::text(std::string(kind_name(c.kind))),
                 Cell::number(v.size, NumberFormat::Full), Cell::count(static_cast<long long>(c.checked)),
                 Cell::count(static_cast<long long>(c.violations)),
                 c.checked ? Cell::number(c.max_ratio, NumberFormat::Full) : Cell::missing(),
                 Cell::number(v.condition_value, NumberFormat::Full), Cell::flag(v.applicable)});
  }
  for (const SkippedTrial& s : v.skipped) {
    doc.add_row({Cell::text("trial " + std::to_string(s.trial) + ": " + s.reason), Cell::text("skipped"),
                 Cell::number(v.size, NumberFormat::Full), Cell::missing(), Cell::missing(), Cell::missing(),
                 Cell::missing(), Cell::missing()});
  }
  for (const FirstOrderTrend& t : trends) {
    for (std::size_t k = 0; k < t.sizes.size(); ++k) {
      doc.add_row({Cell::text(t.bound), Cell::text("first_order_trend"), Cell::number(t.sizes[k], NumberFormat::Full),
                   Cell::missing(), Cell::missing(), Cell::number(t.ratios[k], NumberFormat::Full), Cell::missing(),
                   Cell::missing()});
    }
  }
  doc.violations = static_cast<long long>(v.violations);
  doc.timings["analysis_seconds"] = deterministic ? 0.0 : v.seconds_analysis;
  doc.timings["trials_seconds"] = deterministic ? 0.0 : v.seconds_trials;
  return doc;
}

}  // namespace fperturb
