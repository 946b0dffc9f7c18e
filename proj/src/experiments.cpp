#include "fperturb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "fperturb/dense.hpp"
#include "fperturb/errors.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/qr_bounds.hpp"
#include "reference.hpp"

namespace fperturb {

namespace {

using Clock = std::chrono::steady_clock;
namespace ref = reference;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Measured {
  double actual = 0.0;
  std::optional<double> bound;
};

struct Plan {
  std::vector<std::pair<std::string, BoundKind>> checks;
  // Per check: how far the extended-precision reference can be off, so an
  // excess below this is not counted as a violation.
  std::vector<double> resolution;
  bool applicable = false;
  double condition_value = 0.0;
  // Returns one Measured per check; throws to skip the trial.
  std::function<std::vector<Measured>(std::size_t)> run;
};

template <class F>
void run_parallel(std::size_t count, unsigned threads, F&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

double size_of(const PerturbationSpec& spec) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Normwise>) return m.delta;
        else return m.epsilon;
      },
      spec.model);
}

void check_model(Experiment e, const PerturbationSpec& spec) {
  const bool ok = ((e == Experiment::LuNormwise || e == Experiment::QrNormwise) &&
                   std::holds_alternative<Normwise>(spec.model)) ||
                  (e == Experiment::LuComponentwise && std::holds_alternative<ComponentwiseLU>(spec.model)) ||
                  (e == Experiment::QrComponentwise && std::holds_alternative<ComponentwiseQR>(spec.model));
  if (!ok) throw Error("perturbation model does not match experiment " + std::string(experiment_name(e)));
}

std::optional<double> when(bool ok, double value) {
  if (!ok) return std::nullopt;
  return value;
}

ref::XLu reference_lu(const ref::XMatrix& m) {
  auto f = ref::lu(m);
  if (!f) throw Error("perturbed matrix has an exactly zero pivot");
  return std::move(*f);
}

ref::XMatrix reference_r(const ref::XMatrix& m) {
  auto r = ref::qr_r(m);
  if (!r) throw Error("perturbed matrix has an exactly zero column");
  return std::move(*r);
}

// Backward error of one reference factorization of an m x n matrix,
// relative to the size of its data, with a safety factor of 4.
double reference_gamma(std::size_t m, std::size_t n) {
  return 4.0 * static_cast<double>(m * n + 2) * ref::kUnitRoundoff;
}

double max_abs(const std::vector<double>& v) { return norm(v, NormKind::MaxEntry); }
double sum_abs(const std::vector<double>& v) { return norm(v, NormKind::SumEntry); }

Plan lu_normwise_plan(const Matrix& a, double delta, std::uint64_t seed) {
  const LuFactors f = lu_factor(a);
  auto an = std::make_shared<LuNormwiseAnalysis>(f);
  const LuNormwiseReport rep = an->evaluate(delta);
  auto base = std::make_shared<ref::XLu>(reference_lu(ref::XMatrix(a)));
  Plan p;
  p.checks = {{"rigorous_dl", BoundKind::Rigorous},        {"rigorous_du", BoundKind::Rigorous},
              {"first_order_dl", BoundKind::FirstOrder},   {"first_order_du", BoundKind::FirstOrder},
              {"comparison_dl", BoundKind::Comparison},    {"comparison_du", BoundKind::Comparison}};
  p.applicable = rep.applicable;
  p.condition_value = rep.condition_value;
  // Both the base and the perturbed factors come from the reference.
  const double data = 2.0 * reference_gamma(a.rows(), a.cols()) * frobenius_norm(abs(f.L) * abs(f.U));
  const double res_l = data * an->yl_norm();
  const double res_u = data * an->yu_norm();
  p.resolution = {res_l, res_u, res_l, res_u, res_l, res_u};
  p.run = [a, delta, seed, rep, base](std::size_t t) {
    RngStream rng = RngStream::for_trial(seed, t);
    const Matrix da = sample_normwise(a.rows(), a.cols(), delta, rng);
    const ref::XLu pert = reference_lu(ref::sum(a, da));
    const double dl = ref::distance(pert.L, base->L);
    const double du = ref::distance(pert.U, base->U);
    const bool fo = rep.first_order_applicable;
    return std::vector<Measured>{{dl, rep.rigorous_dl},
                                 {du, rep.rigorous_du},
                                 {dl, when(fo, rep.first_order_dl)},
                                 {du, when(fo, rep.first_order_du)},
                                 {dl, rep.comparison.bound_dl},
                                 {du, rep.comparison.bound_du}};
  };
  return p;
}

Plan lu_componentwise_plan(const Matrix& a, double eps, std::uint64_t seed, MagnitudeMode mode) {
  const LuFactors f = lu_factor(a);
  auto an = std::make_shared<LuComponentwiseAnalysis>(f);
  const LuComponentwiseReport rep = an->evaluate(eps);
  auto tilde = std::make_shared<ref::XMatrix>(ref::product(f.L, f.U));
  auto lt = std::make_shared<ref::XMatrix>(f.L);
  auto ut = std::make_shared<ref::XMatrix>(f.U);
  Plan p;
  p.checks = {{"rigorous_dl", BoundKind::Rigorous},       {"rigorous_du", BoundKind::Rigorous},
              {"first_order_dl_F", BoundKind::FirstOrder}, {"first_order_du_F", BoundKind::FirstOrder},
              {"first_order_dl_M", BoundKind::FirstOrder}, {"first_order_du_M", BoundKind::FirstOrder},
              {"first_order_dl_S", BoundKind::FirstOrder}, {"first_order_du_S", BoundKind::FirstOrder},
              {"comparison_dl", BoundKind::Comparison},   {"comparison_du", BoundKind::Comparison}};
  p.applicable = rep.applicable;
  p.condition_value = rep.tau;
  // Only the perturbed factors come from the reference; its backward error is
  // componentwise in |L~||U~|, mapped through |Y_L~| and |Y_U~|.
  const double gamma = reference_gamma(a.rows(), a.cols());
  const double res_l = gamma * rep.a;
  const double res_u = gamma * rep.b;
  const double sum_factor = static_cast<double>(a.rows());
  p.resolution = {res_l, res_u, res_l, res_u, res_l, res_u, sum_factor * res_l, sum_factor * res_u, res_l, res_u};
  p.run = [an, eps, seed, mode, rep, tilde, lt, ut](std::size_t t) {
    RngStream rng = RngStream::for_trial(seed, t);
    const Matrix da = sample_within_envelope(an->envelope(), eps, rng, mode);
    ref::XMatrix perturbed = *tilde;
    const auto d = da.data();
    for (std::size_t i = 0; i < perturbed.a.size(); ++i) perturbed.a[i] -= d[i];
    const ref::XLu pert = reference_lu(perturbed);
    const std::vector<double> dl = ref::difference(*lt, pert.L);
    const std::vector<double> du = ref::difference(*ut, pert.U);
    const bool fo = rep.first_order_applicable;
    return std::vector<Measured>{{norm2(dl), rep.rigorous_dl},
                                 {norm2(du), rep.rigorous_du},
                                 {norm2(dl), when(fo, rep.first_order_dl_F)},
                                 {norm2(du), when(fo, rep.first_order_du_F)},
                                 {max_abs(dl), when(fo, rep.first_order_dl_M)},
                                 {max_abs(du), when(fo, rep.first_order_du_M)},
                                 {sum_abs(dl), when(fo, rep.first_order_dl_S)},
                                 {sum_abs(du), when(fo, rep.first_order_du_S)},
                                 {norm2(dl), rep.comparison_dl},
                                 {norm2(du), rep.comparison_du}};
  };
  return p;
}

Plan qr_normwise_plan(const Matrix& a, double delta, std::uint64_t seed) {
  const QrFactors f = qr_factor(a);
  auto an = std::make_shared<QrNormwiseAnalysis>(f);
  const QrNormwiseReport rep0 = an->evaluate(delta, delta);
  auto base = std::make_shared<ref::XMatrix>(reference_r(ref::XMatrix(a)));
  auto qt = std::make_shared<Matrix>(f.Q.transposed());
  Plan p;
  p.checks = {{"rigorous_dr", BoundKind::Rigorous}, {"first_order_dr", BoundKind::FirstOrder}};
  for (const NamedScaling& s : an->scalings()) p.checks.emplace_back("comparison_dr_" + s.name, BoundKind::Comparison);
  p.applicable = rep0.applicable;
  p.condition_value = rep0.condition_value;
  p.resolution.assign(p.checks.size(),
                      2.0 * reference_gamma(a.rows(), a.cols()) * an->gr_norm() * frobenius_norm(a));
  p.run = [a, delta, seed, an, base, qt](std::size_t t) {
    RngStream rng = RngStream::for_trial(seed, t);
    const Matrix da = sample_normwise(a.rows(), a.cols(), delta, rng);
    const double delta1 = std::min(frobenius_norm(*qt * da), delta);
    const QrNormwiseReport rep = an->evaluate(delta1, delta);
    const double dr = ref::distance(reference_r(ref::sum(a, da)), *base);
    std::vector<Measured> out{{dr, rep.rigorous_dr}, {dr, when(rep.first_order_applicable, rep.first_order_dr)}};
    for (const ChangStehleQrBound& b : rep.comparisons) out.push_back({dr, b.bound});
    return out;
  };
  return p;
}

Plan qr_componentwise_plan(const Matrix& a, const ComponentwiseQR& model, std::uint64_t seed, MagnitudeMode mode) {
  const QrFactors f = qr_factor(a);
  auto an = std::make_shared<QrComponentwiseAnalysis>(f, model.C);
  const double eps = model.epsilon;
  const QrComponentwiseReport rep = an->evaluate(eps);
  auto base = std::make_shared<ref::XMatrix>(reference_r(ref::XMatrix(a)));
  auto envelope = std::make_shared<Matrix>(model.C * abs(a));
  Plan p;
  p.checks = {{"rigorous_dr", BoundKind::Rigorous}, {"first_order_dr", BoundKind::FirstOrder}};
  for (const QrScaledQuantities& s : rep.scaled) p.checks.emplace_back("comparison_dr_" + s.name, BoundKind::Comparison);
  p.applicable = rep.applicable;
  p.condition_value = rep.condition_value;
  const double gr = QrNormwiseAnalysis(f).gr_norm();
  p.resolution.assign(p.checks.size(), 2.0 * reference_gamma(a.rows(), a.cols()) * gr * frobenius_norm(a));
  p.run = [a, eps, seed, mode, rep, base, envelope](std::size_t t) {
    RngStream rng = RngStream::for_trial(seed, t);
    const Matrix da = sample_within_envelope(*envelope, eps, rng, mode);
    const double dr = ref::distance(reference_r(ref::sum(a, da)), *base);
    std::vector<Measured> out{{dr, rep.rigorous_dr}, {dr, when(rep.first_order_applicable, rep.first_order_dr)}};
    for (const QrScaledQuantities& s : rep.scaled) out.push_back({dr, s.comparison_dr});
    return out;
  };
  return p;
}

Plan make_plan(const Matrix& a, Experiment e, const PerturbationSpec& spec, MagnitudeMode mode) {
  switch (e) {
    case Experiment::LuNormwise:
      return lu_normwise_plan(a, size_of(spec), spec.seed);
    case Experiment::LuComponentwise:
      return lu_componentwise_plan(a, size_of(spec), spec.seed, mode);
    case Experiment::QrNormwise:
      return qr_normwise_plan(a, size_of(spec), spec.seed);
    case Experiment::QrComponentwise:
      return qr_componentwise_plan(a, std::get<ComponentwiseQR>(spec.model), spec.seed, mode);
  }
  throw Error("unknown experiment");
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::LuNormwise:
      return "lu-normwise";
    case Experiment::LuComponentwise:
      return "lu-componentwise";
    case Experiment::QrNormwise:
      return "qr-normwise";
    case Experiment::QrComponentwise:
      return "qr-componentwise";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::LuNormwise, Experiment::LuComponentwise, Experiment::QrNormwise,
                       Experiment::QrComponentwise}) {
    if (experiment_name(e) == name) return e;
  }
  return std::nullopt;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("FPERTURB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

VerificationReport verify_bounds(const Matrix& a, Experiment experiment, const PerturbationSpec& spec,
                                 std::size_t trials, const VerifyOptions& options) {
  validate(spec);
  check_model(experiment, spec);
  VerificationReport report;
  report.experiment = experiment;
  report.size = size_of(spec);
  report.trials = trials;

  auto start = Clock::now();
  const Plan plan = make_plan(a, experiment, spec, options.magnitude);
  report.seconds_analysis = seconds_since(start);
  report.applicable = plan.applicable;
  report.condition_value = plan.condition_value;

  std::vector<std::vector<Measured>> results(trials);
  std::vector<std::string> failures(trials);
  start = Clock::now();
  const unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;
  run_parallel(trials, threads, [&](std::size_t t) {
    try {
      results[t] = plan.run(t);
    } catch (const std::exception& ex) {
      failures[t] = ex.what();
      if (failures[t].empty()) failures[t] = "unknown failure";
    }
  });
  report.seconds_trials = seconds_since(start);

  for (const auto& [name, kind] : plan.checks) report.checks.push_back({name, kind, 0, 0, 0.0});
  for (std::size_t t = 0; t < trials; ++t) {
    if (!failures[t].empty()) {
      report.skipped.push_back({t, failures[t]});
      continue;
    }
    ++report.completed;
    for (std::size_t i = 0; i < plan.checks.size(); ++i) {
      const Measured& m = results[t][i];
      if (!m.bound) continue;
      BoundCheck& c = report.checks[i];
      ++c.checked;
      double ratio = 0.0;
      if (*m.bound > 0.0) ratio = m.actual / *m.bound;
      else if (m.actual > 0.0) ratio = std::numeric_limits<double>::infinity();
      c.max_ratio = std::max(c.max_ratio, ratio);
      if (m.actual > *m.bound + plan.resolution[i]) ++c.violations;
    }
  }
  for (const BoundCheck& c : report.checks) {
    if (c.kind == BoundKind::Rigorous) {
      report.violations += c.violations;
      report.max_ratio_rigorous = std::max(report.max_ratio_rigorous, c.max_ratio);
    } else if (c.kind == BoundKind::FirstOrder) {
      report.max_ratio_first_order = std::max(report.max_ratio_first_order, c.max_ratio);
    }
  }
  return report;
}

std::vector<FirstOrderTrend> first_order_trends(const Matrix& a, Experiment experiment, const PerturbationSpec& start,
                                                std::size_t levels) {
  validate(start);
  check_model(experiment, start);
  const double size0 = size_of(start);
  std::vector<double> sizes(levels);
  for (std::size_t k = 0; k < levels; ++k) sizes[k] = std::ldexp(size0, -static_cast<int>(k));

  std::vector<FirstOrderTrend> out;
  auto add = [&](std::string name, const std::function<double(double)>& ratio_at) {
    FirstOrderTrend tr{std::move(name), sizes, {}};
    for (double s : sizes) tr.ratios.push_back(ratio_at(s));
    out.push_back(std::move(tr));
  };

  switch (experiment) {
    case Experiment::LuNormwise: {
      const LuFactors f = lu_factor(a);
      const LuNormwiseAnalysis an(f);
      const ref::XLu base = reference_lu(ref::XMatrix(a));
      const std::size_t n = a.rows();
      auto along = [&](const Vector& dir, bool lower, double norm_y) {
        return [&, lower, norm_y](double s) {
          Matrix da = unvec(dir, n, n);
          da *= s;
          const ref::XLu p = reference_lu(ref::sum(a, da));
          const double actual = lower ? ref::distance(p.L, base.L) : ref::distance(p.U, base.U);
          return actual / (norm_y * s);
        };
      };
      // A zero operator (n = 1 for Y_L) has no direction to follow.
      if (an.yl_norm() > 0.0) add("first_order_dl", along(an.yl_direction(), true, an.yl_norm()));
      if (an.yu_norm() > 0.0) add("first_order_du", along(an.yu_direction(), false, an.yu_norm()));
      break;
    }
    case Experiment::LuComponentwise: {
      const LuFactors f = lu_factor(a);
      const LuComponentwiseAnalysis an(f);
      const ref::XMatrix tilde = ref::product(f.L, f.U);
      const ref::XMatrix lt(f.L), ut(f.U);
      const LuComponentwiseReport unit = an.evaluate(1.0);
      for (FactorTarget target : {FactorTarget::L, FactorTarget::U}) {
        const bool lower = target == FactorTarget::L;
        // The factor cannot change to first order, e.g. L of a triangular matrix.
        if ((lower ? unit.first_order_dl_M : unit.first_order_du_M) == 0.0) continue;
        auto change = [&, target, lower](double s) {
          const Matrix da = an.worst_case_m_norm_perturbation(s, target);
          ref::XMatrix m = tilde;
          for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= da.data()[i];
          const ref::XLu p = reference_lu(m);
          return lower ? ref::difference(lt, p.L) : ref::difference(ut, p.U);
        };
        const std::string suffix = lower ? "dl" : "du";
        add("first_order_" + suffix + "_M", [&, change, lower](double s) {
          const LuComponentwiseReport r = an.evaluate(s);
          return max_abs(change(s)) / (lower ? r.first_order_dl_M : r.first_order_du_M);
        });
        add("first_order_" + suffix + "_F", [&, change, lower](double s) {
          const LuComponentwiseReport r = an.evaluate(s);
          return norm2(change(s)) / (lower ? r.first_order_dl_F : r.first_order_du_F);
        });
      }
      break;
    }
    case Experiment::QrNormwise: {
      const QrFactors f = qr_factor(a);
      const QrNormwiseAnalysis an(f);
      const ref::XMatrix base = reference_r(ref::XMatrix(a));
      const Matrix dir = f.Q * unvec(an.gr_direction(), a.cols(), a.cols());
      add("first_order_dr", [&](double s) {
        Matrix da = dir;
        da *= s;
        const double dr = ref::distance(reference_r(ref::sum(a, da)), base);
        return dr / (an.gr_norm() * s);
      });
      break;
    }
    case Experiment::QrComponentwise: {
      const auto& model = std::get<ComponentwiseQR>(start.model);
      const QrFactors f = qr_factor(a);
      const QrComponentwiseAnalysis an(f, model.C);
      const ref::XMatrix base = reference_r(ref::XMatrix(a));
      RngStream rng(start.seed);
      const Matrix pattern = sample_within_envelope(model.C * abs(a), 1.0, rng, MagnitudeMode::Extreme);
      add("first_order_dr", [&](double s) {
        Matrix da = pattern;
        da *= s;
        const double dr = ref::distance(reference_r(ref::sum(a, da)), base);
        return dr / an.evaluate(s).first_order_dr;
      });
      break;
    }
  }
  return out;
}

}  // namespace fperturb
