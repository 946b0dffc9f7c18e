#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fperturb/dense.hpp"
#include "fperturb/scaling.hpp"
#include "fperturb/structured.hpp"

namespace fperturb {

// First- and second-order maps for the R factor:
//   G_R = M_uvec (R^T kron I) M_up [R^{-T} kron I + (I kron R^{-T}) Pi_nn]
//   H_R = M_uvec (R^T kron I) M_up (R^{-T} kron R^{-T})
// uvec(dR) = G_R vec(Q^T dA) + O(||dA||^2).
StructuredOperator build_gr(const Matrix& r);
StructuredOperator build_hr(const Matrix& r);

/// Row 2-norms of R.
ScalingMatrix scaling_d_r(const Matrix& r);
/// Column-norm equilibration of D_c R^{-1}, D_c = diag(row 1-norms of R),
/// kept monotone: a column whose norm falls below its predecessor's repeats
/// the previous entry.
ScalingMatrix scaling_d_e(const Matrix& r);

struct NamedScaling {
  std::string name;
  ScalingMatrix d;
};

/// The two scalings used in the comparison tables, named "Dr" and "De".
std::vector<NamedScaling> default_qr_scalings(const Matrix& r);

enum class QrModel { Normwise, Componentwise };

/// Earlier rigorous bound at one fixed scaling D.
struct ChangStehleQrBound {
  std::string name;
  double zeta = 0.0;
  // Everything multiplying delta (normwise) or eps (componentwise).
  double coefficient = 0.0;
  double condition_value = 0.0;  // must be < sqrt(3/2) - 1
  bool applicable = false;
  std::optional<double> bound;
};

/// Normwise: (sqrt6 + sqrt3) sqrt(1 + zeta_D^2) kappa_2(D^{-1} R) delta,
/// valid when ||R^{-1}|| delta < sqrt(3/2) - 1.
/// Componentwise: (sqrt6 + sqrt3) sqrt(1 + zeta_D^2) ||D^{-1} R|| || |R||R^{-1}| D || ||C|Q|||_F eps,
/// valid when || |R||R^{-1}| || ||C|Q|||_F eps < sqrt(3/2) - 1. C and Q are
/// ignored in the normwise model.
ChangStehleQrBound chang_stehle_qr(const Matrix& r, double delta_or_eps, QrModel model, const ScalingMatrix& d,
                                   const Matrix& c = {}, const Matrix& q = {});

inline constexpr double kChangStehleConstant = 2.449489742783178 + 1.7320508075688772;  // sqrt6 + sqrt3
inline constexpr double kChangStehleLimit = 0.22474487139158905;                       // sqrt(3/2) - 1

struct QrNormwiseReport {
  double gr_norm = 0.0;
  double hr_norm = 0.0;
  double delta1 = 0.0;  // ||Q^T dA||_F
  double delta2 = 0.0;  // ||dA||_F
  double condition_value = 0.0;               // ||H_R|| (||G_R|| delta2 + ||H_R|| delta2^2) < 1/4
  double strengthened_condition_value = 0.0;  // ||H_R|| (1 + 2 ||G_R||) delta2 < 1/2
  bool applicable = false;
  bool strengthened_applicable = false;
  std::optional<double> rigorous_dr;
  std::optional<double> relaxed_dr;
  std::optional<double> simple_dr;  // (1 + 2 ||G_R||) delta2
  double first_order_dr = 0.0;      // ||G_R|| delta1
  double fo_condition_value = 0.0;  // ||R^{-1}|| delta2 < 1
  bool first_order_applicable = false;
  std::vector<ChangStehleQrBound> comparisons;
};

class QrNormwiseAnalysis {
 public:
  /// Comparisons at D_r and D_e.
  explicit QrNormwiseAnalysis(const QrFactors& f);
  QrNormwiseAnalysis(const QrFactors& f, std::vector<NamedScaling> scalings);

  QrNormwiseReport evaluate(double delta1, double delta2) const;

  double gr_norm() const noexcept { return gr_norm_; }
  double hr_norm() const noexcept { return hr_norm_; }
  double r_inv_norm() const noexcept { return r_inv_norm_; }
  /// Dominant right singular vector of G_R: vec(Q^T dA) of the worst-case direction.
  const Vector& gr_direction() const noexcept { return gr_dir_; }
  const std::vector<NamedScaling>& scalings() const noexcept { return scalings_; }
  /// kappa_2(D^{-1} R) per scaling, aligned with scalings().
  const Vector& scaled_conditions() const noexcept { return kappas_; }

 private:
  double gr_norm_ = 0.0, hr_norm_ = 0.0, r_inv_norm_ = 0.0;
  Vector gr_dir_;
  std::vector<NamedScaling> scalings_;
  Vector kappas_;
};

QrNormwiseReport qr_normwise_bounds(const QrFactors& f, double delta1, double delta2);

struct QrScaledQuantities {
  std::string name;
  double zeta = 0.0;
  double gamma = 0.0;  // gamma_R(X)
  double eta = 0.0;    // ||X^{-1}|R||| / ||X^{-1} R||
  // sqrt(1 + zeta^2) ||X^{-1}|R||| || |R||R^{-1}| X ||, the upper end of the
  // sandwich around || |G_R| (|R^T| kron I) ||.
  double sandwich_upper = 0.0;
  // sqrt(1 + zeta^2) kappa_2(X^{-1} R), the upper end of the G_R sandwich.
  double gr_upper = 0.0;
  std::optional<double> comparison_dr;
};

struct QrComponentwiseReport {
  double epsilon = 0.0;
  double a_t = 0.0;  // || |G_R| (|R^T| kron I) || || |Q^T| C |Q| ||_F
  double b_t = 0.0;  // || |H_R| (|R^T| kron |R^T|) || || |Q^T| C^T C |Q| ||_F
  double c_t = 0.0;  // || |H_R| ||
  double condition_value = 0.0;     // c~ (a~ eps + b~ eps^2) < 1/4
  double strengthened_value = 0.0;  // c~ (|| |R| || ||C|Q|||_F + 2 a~) eps < 1/2
  bool applicable = false;
  bool strengthened_applicable = false;
  std::optional<double> rigorous_dr;
  std::optional<double> relaxed_dr;
  std::optional<double> simple_dr;  // (|| |R| || ||C|Q|||_F + 2 a~) eps
  double first_order_dr = 0.0;      // a~ eps
  double fo_condition_value = 0.0;  // || |R||R^{-1}| || ||C|Q|||_F eps < 1
  bool first_order_applicable = false;
  double comparison_condition_value = 0.0;  // same left side, against sqrt(3/2) - 1
  bool comparison_applicable = false;

  double q_ratio = 0.0;       // || |Q^T| C |Q| ||_F / ||C|Q|||_F
  double gamma_R = 0.0;       // simple bound / (eps ||R||_2)
  double abs_gr_scaled = 0.0;  // || |G_R| (|R^T| kron I) ||_2
  double abs_r_norm = 0.0;    // || |R| ||_2
  std::vector<QrScaledQuantities> scaled;  // one entry per scaling, e.g. Dr and De
};

/// Quantities of the componentwise model |dA| <= eps C |A|, computed once per
/// (factors, C). Needs the dense |G_R|, |H_R|, so n^2 must not exceed the threshold.
class QrComponentwiseAnalysis {
 public:
  QrComponentwiseAnalysis(const QrFactors& f, const Matrix& c, std::vector<NamedScaling> scalings,
                          std::size_t threshold = kExplicitThreshold);
  QrComponentwiseAnalysis(const QrFactors& f, const Matrix& c, std::size_t threshold = kExplicitThreshold);

  QrComponentwiseReport evaluate(double epsilon) const;

  /// Wall-clock seconds spent on gamma_R and on each gamma_R(X).
  double seconds_gamma() const noexcept { return t_gamma_; }
  const Vector& seconds_scaled() const noexcept { return t_scaled_; }

 private:
  double a_op_ = 0.0, b_op_ = 0.0, c_t_ = 0.0;
  double qcq_F_ = 0.0, qccq_F_ = 0.0, cq_F_ = 0.0;
  double abs_r_ = 0.0, r_2_ = 0.0, rr_inv_ = 0.0;
  std::vector<QrScaledQuantities> scaled_;
  double t_gamma_ = 0.0;
  Vector t_scaled_;
};

QrComponentwiseReport qr_componentwise_bounds(const QrFactors& f, const Matrix& c, double epsilon,
                                              std::vector<NamedScaling> scalings);

}  // namespace fperturb
