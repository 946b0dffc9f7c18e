#pragma once

#include <chrono>
#include <cstddef>
#include <optional>

#include "fperturb/dense.hpp"
#include "fperturb/scaling.hpp"
#include "fperturb/structured.hpp"

namespace fperturb {

// Operators mapping vec(dA) to the first-order changes of the LU factors:
//   slvec(dL) = Y_L vec(dA),  Y_L = M_slvec (I kron L) M_slt ([U_{n-1}^{-T} 0; 0 0] kron L^{-1})
//   uvec(dU)  = Y_U vec(dA),  Y_U = M_uvec (U^T kron I) M_ut (U^{-T} kron L^{-1})
StructuredOperator build_yl(const LuFactors& f);
StructuredOperator build_yu(const LuFactors& f);
// The same products without the leading M_slvec / M_uvec; their spectral
// norms equal those of Y_L / Y_U.
StructuredOperator build_yl_unselected(const LuFactors& f);
StructuredOperator build_yu_unselected(const LuFactors& f);

/// Comparison bounds of the classic/refined matrix equation approach at
/// fixed scalings (the infimum over all scalings is not attempted).
struct ChangStehleLuBounds {
  double kappa_l = 0.0;          // kappa_2(L D_L^{-1})
  double kappa_u = 0.0;          // kappa_2(D_U^{-1} U)
  double condition_value = 0.0;  // ||L^{-1}|| ||U^{-1}|| delta, must be < 1/4
  bool applicable = false;
  std::optional<double> bound_dl;
  std::optional<double> bound_du;
};

ChangStehleLuBounds chang_stehle_lu(const LuFactors& f, double delta, const ScalingMatrix& d_l,
                                    const ScalingMatrix& d_u);

struct LuNormwiseReport {
  double delta = 0.0;
  double yl_norm = 0.0;
  double yu_norm = 0.0;
  double condition_value = 0.0;  // ||Y_L|| ||Y_U|| delta, must be < 1/4
  bool applicable = false;
  std::optional<double> rigorous_dl;
  std::optional<double> rigorous_du;
  std::optional<double> relaxed_dl;  // 2 ||Y_L|| delta
  std::optional<double> relaxed_du;
  // 2 ||(I kron L) M_slt (...)|| delta, the unselected operator form.
  std::optional<double> relaxed_dl_explicit;
  std::optional<double> relaxed_du_explicit;
  // Leading terms; valid as first-order bounds under the weaker condition
  // ||L^{-1}|| ||U^{-1}|| delta < 1.
  double first_order_dl = 0.0;
  double first_order_du = 0.0;
  double fo_condition_value = 0.0;
  bool first_order_applicable = false;
  ChangStehleLuBounds comparison;
};

/// Norms needed by the normwise LU bounds, computed once per factorization.
class LuNormwiseAnalysis {
 public:
  /// Uses the heuristic scalings D_L = diag(||L(:,j)||), D_U = diag(||U(j,:)||).
  explicit LuNormwiseAnalysis(const LuFactors& f);
  LuNormwiseAnalysis(const LuFactors& f, const ScalingMatrix& d_l, const ScalingMatrix& d_u);

  LuNormwiseReport evaluate(double delta) const;

  double yl_norm() const noexcept { return yl_norm_; }
  double yu_norm() const noexcept { return yu_norm_; }
  double yl_unselected_norm() const noexcept { return yl_full_norm_; }
  double yu_unselected_norm() const noexcept { return yu_full_norm_; }
  double l_inv_norm() const noexcept { return l_inv_norm_; }
  double u_inv_norm() const noexcept { return u_inv_norm_; }
  double u_lead_inv_norm() const noexcept { return u_lead_inv_norm_; }
  double kappa_l_scaled() const noexcept { return kappa_l_; }
  double kappa_u_scaled() const noexcept { return kappa_u_; }
  /// Dominant right singular vectors of Y_L / Y_U, i.e. worst-case vec(dA) directions.
  const Vector& yl_direction() const noexcept { return yl_dir_; }
  const Vector& yu_direction() const noexcept { return yu_dir_; }

 private:
  double yl_norm_ = 0.0, yu_norm_ = 0.0;
  double yl_full_norm_ = 0.0, yu_full_norm_ = 0.0;
  double l_inv_norm_ = 0.0, u_inv_norm_ = 0.0, u_lead_inv_norm_ = 0.0;
  double kappa_l_ = 0.0, kappa_u_ = 0.0;
  Vector yl_dir_, yu_dir_;
};

LuNormwiseReport lu_normwise_bounds(const LuFactors& f, double delta);

/// ||U_{n-1}^{-1}||_2 for the leading (n-1) x (n-1) block; 0 when n = 1.
double leading_block_inverse_norm(const Matrix& u);

/// n u / (1 - n u), the Gaussian elimination backward error constant.
double gaussian_elimination_epsilon(std::size_t n);

struct LuComponentwiseReport {
  double epsilon = 0.0;
  double a = 0.0;            // || |Y_L~| vec(|L~||U~|) ||_F
  double b = 0.0;            // || |Y_U~| vec(|L~||U~|) ||_F
  double c = 0.0;            // b || |Y_L~| ||_2 - a || |Y_U~| ||_2
  double yl_abs_norm = 0.0;  // || |Y_L~| ||_2
  double yu_abs_norm = 0.0;  // || |Y_U~| ||_2
  bool applicable = false;   // |c| eps < 1 and 4 a || |Y_U~| || eps < (1 - c eps)^2
  std::optional<double> rigorous_dl;
  std::optional<double> relaxed_dl;
  std::optional<double> rigorous_du;
  std::optional<double> relaxed_du;

  // First-order leading terms in the Frobenius, max-entry and sum-entry norms.
  double first_order_dl_F = 0.0, first_order_du_F = 0.0;
  double first_order_dl_M = 0.0, first_order_du_M = 0.0;
  double first_order_dl_S = 0.0, first_order_du_S = 0.0;
  double fo_condition_value = 0.0;  // || |L~^{-1}||L~| ||_F || |U~||U~^{-1}| ||_F eps < 1
  bool first_order_applicable = false;
  // Earlier first-order bounds || |L~||L~^{-1}||L~| || || |U~_{n-1}||U~_{n-1}^{-1}| || eps etc.
  double chang_first_order_dl_F = 0.0, chang_first_order_du_F = 0.0;
  double chang_first_order_dl_S = 0.0, chang_first_order_du_S = 0.0;

  std::optional<double> gamma_L;  // a / (1 - c eps) / ||L~||_F
  std::optional<double> gamma_U;  // b / (1 + c eps) / ||U~||_F
  double gamma_L_D = 0.0;
  double gamma_U_D = 0.0;
  double eta_DL = 0.0;
  double eta_DU = 0.0;
  double tau = 0.0;  // c eps

  double comparison_condition_value = 0.0;  // || |L~^{-1}||L~| ||_F || |U~||U~^{-1}| ||_F eps < 1/4
  bool comparison_applicable = false;
  std::optional<double> comparison_dl;  // 2 gamma_L(D_L) ||L~||_F eps
  std::optional<double> comparison_du;
};

enum class FactorTarget { L, U };

/// Quantities of the componentwise (backward error) LU analysis around the
/// computed factors L~, U~. Needs the dense |Y_L~|, |Y_U~|, so n^2 must not
/// exceed the explicit threshold.
class LuComponentwiseAnalysis {
 public:
  LuComponentwiseAnalysis(const LuFactors& tilde, const ScalingMatrix& d_l, const ScalingMatrix& d_u,
                          std::size_t threshold = kExplicitThreshold);
  explicit LuComponentwiseAnalysis(const LuFactors& tilde, std::size_t threshold = kExplicitThreshold);

  LuComponentwiseReport evaluate(double epsilon) const;

  /// dA with vec(dA) = eps D_k vec(|L~||U~|), D_k = diag(sign(Y(k,:))), k the
  /// row attaining the max-entry first-order bound for the target factor.
  Matrix worst_case_m_norm_perturbation(double epsilon, FactorTarget target) const;

  std::size_t order() const noexcept { return n_; }
  const Matrix& envelope() const noexcept { return envelope_; }
  const Matrix& yl_dense() const noexcept { return yl_; }
  const Matrix& yu_dense() const noexcept { return yu_; }
  /// Wall-clock seconds spent on gamma_L, gamma_U and on gamma_L(D_L), gamma_U(D_U).
  /// The scaled timing excludes the |L~^{-1}||L~| style products shared with other quantities.
  double seconds_gamma() const noexcept { return t_gamma_; }
  double seconds_gamma_scaled() const noexcept { return t_gamma_D_; }

 private:
  void compute_static(const LuFactors& tilde, const ScalingMatrix& d_l, const ScalingMatrix& d_u,
                      std::chrono::steady_clock::time_point start);

  std::size_t n_ = 0;
  Matrix envelope_;  // |L~||U~|
  Matrix yl_, yu_;   // signed dense Y_L~, Y_U~
  Vector yl_e_, yu_e_;
  double a_ = 0.0, b_ = 0.0, yl_abs_ = 0.0, yu_abs_ = 0.0;
  double l_fro_ = 0.0, u_fro_ = 0.0;
  double l_cond_F_ = 0.0, u_cond_F_ = 0.0;  // || |L~^{-1}||L~| ||_F, || |U~||U~^{-1}| ||_F
  double chang_l_F_ = 0.0, chang_u_F_ = 0.0, chang_l_S_ = 0.0, chang_u_S_ = 0.0;
  double gamma_L_D_ = 0.0, gamma_U_D_ = 0.0, eta_DL_ = 0.0, eta_DU_ = 0.0;
  double t_gamma_ = 0.0, t_gamma_D_ = 0.0;
};

LuComponentwiseReport lu_componentwise_bounds(const LuFactors& tilde, double epsilon,
                                              const ScalingMatrix& d_l, const ScalingMatrix& d_u);

Matrix worst_case_m_norm_perturbation(const LuFactors& tilde, double epsilon, FactorTarget target);

}  // namespace fperturb
