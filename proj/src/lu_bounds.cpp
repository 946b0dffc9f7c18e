#include "fperturb/lu_bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fperturb {

namespace {

// [U_{n-1}^{-1} 0; 0 0]
Matrix padded_leading_inverse(const Matrix& u) {
  const std::size_t n = u.rows();
  Matrix w(n, n);
  if (n < 2) return w;
  const Matrix inv = triangular_inverse(u.leading_block(n - 1), Triangle::Upper);
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) w(i, j) = inv(i, j);
  return w;
}

void check_factors(const LuFactors& f) {
  if (!f.L.is_square() || !f.U.is_square() || f.L.rows() != f.U.rows())
    throw DimensionMismatch("LU factors must be square and of equal order");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double fro(const Matrix& m) { return frobenius_norm(m); }
double two(const Matrix& m) { return spectral_norm(m); }

}  // namespace

StructuredOperator build_yl_unselected(const LuFactors& f) {
  check_factors(f);
  const std::size_t n = f.L.rows();
  const Matrix l_inv = triangular_inverse(f.L, Triangle::Lower);
  const Matrix w = padded_leading_inverse(f.U);
  return StructuredOperator::kron(Matrix::identity(n), f.L) * StructuredOperator::select(SelectionKind::Slt, n) *
         StructuredOperator::kron(w.transposed(), l_inv);
}

StructuredOperator build_yu_unselected(const LuFactors& f) {
  check_factors(f);
  const std::size_t n = f.L.rows();
  const Matrix l_inv = triangular_inverse(f.L, Triangle::Lower);
  const Matrix u_inv = triangular_inverse(f.U, Triangle::Upper);
  return StructuredOperator::kron(f.U.transposed(), Matrix::identity(n)) *
         StructuredOperator::select(SelectionKind::Ut, n) * StructuredOperator::kron(u_inv.transposed(), l_inv);
}

StructuredOperator build_yl(const LuFactors& f) {
  return StructuredOperator::select(SelectionKind::Slvec, f.L.rows()) * build_yl_unselected(f);
}

StructuredOperator build_yu(const LuFactors& f) {
  return StructuredOperator::select(SelectionKind::Uvec, f.L.rows()) * build_yu_unselected(f);
}

double leading_block_inverse_norm(const Matrix& u) {
  if (u.rows() < 2) return 0.0;
  return two(triangular_inverse(u.leading_block(u.rows() - 1), Triangle::Upper));
}

double gaussian_elimination_epsilon(std::size_t n) {
  const double nu = static_cast<double>(n) * kUnitRoundoff;
  return nu / (1.0 - nu);
}

ChangStehleLuBounds chang_stehle_lu(const LuFactors& f, double delta, const ScalingMatrix& d_l,
                                    const ScalingMatrix& d_u) {
  check_factors(f);
  ChangStehleLuBounds out;
  out.kappa_l = triangular_condition(scale_cols_inverse(f.L, d_l), Triangle::Lower);
  out.kappa_u = triangular_condition(scale_rows_inverse(d_u, f.U), Triangle::Upper);
  const double l_inv = two(triangular_inverse(f.L, Triangle::Lower));
  const double u_inv = two(triangular_inverse(f.U, Triangle::Upper));
  out.condition_value = l_inv * u_inv * delta;
  out.applicable = out.condition_value < 0.25;
  if (out.applicable) {
    out.bound_dl = 2.0 * out.kappa_l * leading_block_inverse_norm(f.U) * delta;
    out.bound_du = 2.0 * out.kappa_u * l_inv * delta;
  }
  return out;
}

LuNormwiseAnalysis::LuNormwiseAnalysis(const LuFactors& f)
    : LuNormwiseAnalysis(f, heuristic_scaling(f.L, ScalingMode::Columns),
                         heuristic_scaling(f.U, ScalingMode::Rows)) {}

LuNormwiseAnalysis::LuNormwiseAnalysis(const LuFactors& f, const ScalingMatrix& d_l, const ScalingMatrix& d_u) {
  check_factors(f);
  SpectralEstimate yl = operator_spectral_estimate(build_yl(f));
  SpectralEstimate yu = operator_spectral_estimate(build_yu(f));
  yl_norm_ = yl.sigma;
  yu_norm_ = yu.sigma;
  yl_dir_ = std::move(yl.right);
  yu_dir_ = std::move(yu.right);
  yl_full_norm_ = operator_spectral_norm(build_yl_unselected(f));
  yu_full_norm_ = operator_spectral_norm(build_yu_unselected(f));
  l_inv_norm_ = two(triangular_inverse(f.L, Triangle::Lower));
  u_inv_norm_ = two(triangular_inverse(f.U, Triangle::Upper));
  u_lead_inv_norm_ = leading_block_inverse_norm(f.U);
  kappa_l_ = triangular_condition(scale_cols_inverse(f.L, d_l), Triangle::Lower);
  kappa_u_ = triangular_condition(scale_rows_inverse(d_u, f.U), Triangle::Upper);
}

LuNormwiseReport LuNormwiseAnalysis::evaluate(double delta) const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error("delta must be a finite nonnegative number");
  LuNormwiseReport r;
  r.delta = delta;
  r.yl_norm = yl_norm_;
  r.yu_norm = yu_norm_;
  r.condition_value = yl_norm_ * yu_norm_ * delta;
  r.applicable = r.condition_value < 0.25;
  if (r.applicable) {
    const double root = 1.0 + std::sqrt(1.0 - 4.0 * r.condition_value);
    r.rigorous_dl = 2.0 * yl_norm_ * delta / root;
    r.rigorous_du = 2.0 * yu_norm_ * delta / root;
    r.relaxed_dl = 2.0 * yl_norm_ * delta;
    r.relaxed_du = 2.0 * yu_norm_ * delta;
    r.relaxed_dl_explicit = 2.0 * yl_full_norm_ * delta;
    r.relaxed_du_explicit = 2.0 * yu_full_norm_ * delta;
  }
  r.first_order_dl = yl_norm_ * delta;
  r.first_order_du = yu_norm_ * delta;
  r.fo_condition_value = l_inv_norm_ * u_inv_norm_ * delta;
  r.first_order_applicable = r.fo_condition_value < 1.0;

  ChangStehleLuBounds& cs = r.comparison;
  cs.kappa_l = kappa_l_;
  cs.kappa_u = kappa_u_;
  cs.condition_value = r.fo_condition_value;
  cs.applicable = cs.condition_value < 0.25;
  if (cs.applicable) {
    cs.bound_dl = 2.0 * kappa_l_ * u_lead_inv_norm_ * delta;
    cs.bound_du = 2.0 * kappa_u_ * l_inv_norm_ * delta;
  }
  return r;
}

LuNormwiseReport lu_normwise_bounds(const LuFactors& f, double delta) { return LuNormwiseAnalysis(f).evaluate(delta); }

LuComponentwiseAnalysis::LuComponentwiseAnalysis(const LuFactors& tilde, std::size_t threshold)
    : LuComponentwiseAnalysis(tilde, heuristic_scaling(tilde.L, ScalingMode::Columns),
                              heuristic_scaling(tilde.U, ScalingMode::Rows), threshold) {}

LuComponentwiseAnalysis::LuComponentwiseAnalysis(const LuFactors& tilde, const ScalingMatrix& d_l,
                                                 const ScalingMatrix& d_u, std::size_t threshold) {
  check_factors(tilde);
  n_ = tilde.L.rows();
  const auto start = Clock::now();
  yl_ = build_yl(tilde).materialize(threshold);
  yu_ = build_yu(tilde).materialize(threshold);
  compute_static(tilde, d_l, d_u, start);
}

void LuComponentwiseAnalysis::compute_static(const LuFactors& t, const ScalingMatrix& d_l,
                                             const ScalingMatrix& d_u, std::chrono::steady_clock::time_point start) {
  const Matrix abs_l = abs(t.L);
  const Matrix abs_u = abs(t.U);
  envelope_ = abs_l * abs_u;
  const Vector e = vec(envelope_);
  const Matrix yl_abs = abs(yl_);
  const Matrix yu_abs = abs(yu_);
  yl_e_ = yl_abs * std::span<const double>(e);
  yu_e_ = yu_abs * std::span<const double>(e);
  a_ = norm2(yl_e_);
  b_ = norm2(yu_e_);
  yl_abs_ = two(yl_abs);
  yu_abs_ = two(yu_abs);
  l_fro_ = fro(t.L);
  u_fro_ = fro(t.U);
  t_gamma_ = seconds_since(start);

  const Matrix abs_l_inv = abs(triangular_inverse(t.L, Triangle::Lower));
  const Matrix abs_u_inv = abs(triangular_inverse(t.U, Triangle::Upper));
  const Matrix l_cond = abs_l_inv * abs_l;  // |L^-1||L|
  const Matrix u_cond = abs_u * abs_u_inv;  // |U||U^-1|
  l_cond_F_ = fro(l_cond);
  u_cond_F_ = fro(u_cond);

  Matrix u_lead_cond;  // |U_{n-1}||U_{n-1}^{-1}|, empty for n = 1
  if (n_ >= 2) {
    const Matrix lead = t.U.leading_block(n_ - 1);
    u_lead_cond = abs(lead) * abs(triangular_inverse(lead, Triangle::Upper));
  }
  const double u_lead_F = u_lead_cond.empty() ? 0.0 : fro(u_lead_cond);
  const double u_lead_S = u_lead_cond.empty() ? 0.0 : norm(u_lead_cond, NormKind::SumEntry);
  const Matrix l_triple = abs_l * l_cond;  // |L||L^-1||L|
  const Matrix u_triple = u_cond * abs_u;  // |U||U^-1||U|
  chang_l_F_ = fro(l_triple) * u_lead_F;
  chang_l_S_ = norm(l_triple, NormKind::SumEntry) * u_lead_S;
  chang_u_F_ = fro(u_triple) * l_cond_F_;
  chang_u_S_ = norm(u_triple, NormKind::SumEntry) * norm(l_cond, NormKind::SumEntry);

  const auto scaled_start = Clock::now();
  const Matrix l_scaled = scale_cols_inverse(t.L, d_l);  // L D_L^-1
  const Matrix u_scaled = scale_rows_inverse(d_u, t.U);  // D_U^-1 U
  const double l_scaled_2 = two(l_scaled);
  const double u_scaled_2 = two(u_scaled);
  gamma_L_D_ = l_scaled_2 * two(scale_rows(d_l, l_cond)) * u_lead_F / l_fro_;
  gamma_U_D_ = u_scaled_2 * two(scale_cols(u_cond, d_u)) * l_cond_F_ / u_fro_;
  t_gamma_D_ = seconds_since(scaled_start);
  eta_DL_ = two(scale_cols_inverse(abs_l, d_l)) / l_scaled_2;
  eta_DU_ = two(scale_rows_inverse(d_u, abs_u)) / u_scaled_2;
}

LuComponentwiseReport LuComponentwiseAnalysis::evaluate(double epsilon) const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw Error("epsilon must be a finite nonnegative number");
  LuComponentwiseReport r;
  const double eps = epsilon;
  r.epsilon = eps;
  r.a = a_;
  r.b = b_;
  r.c = b_ * yl_abs_ - a_ * yu_abs_;
  r.yl_abs_norm = yl_abs_;
  r.yu_abs_norm = yu_abs_;
  r.tau = r.c * eps;

  const double one_minus = 1.0 - r.tau;
  const double one_plus = 1.0 + r.tau;
  const double disc = one_minus * one_minus - 4.0 * a_ * yu_abs_ * eps;
  r.applicable = std::fabs(r.tau) < 1.0 && disc > 0.0;
  if (r.applicable) {
    const double root = std::sqrt(disc);
    r.rigorous_dl = 2.0 * a_ * eps / (one_minus + root);
    r.relaxed_dl = 2.0 * a_ * eps / one_minus;
    r.rigorous_du = 2.0 * b_ * eps / (one_plus + root);
    r.relaxed_du = 2.0 * b_ * eps / one_plus;
    r.gamma_L = a_ / one_minus / l_fro_;
    r.gamma_U = b_ / one_plus / u_fro_;
  }

  r.first_order_dl_F = a_ * eps;
  r.first_order_du_F = b_ * eps;
  r.first_order_dl_M = norm(yl_e_, NormKind::MaxEntry) * eps;
  r.first_order_du_M = norm(yu_e_, NormKind::MaxEntry) * eps;
  r.first_order_dl_S = norm(yl_e_, NormKind::SumEntry) * eps;
  r.first_order_du_S = norm(yu_e_, NormKind::SumEntry) * eps;
  r.fo_condition_value = l_cond_F_ * u_cond_F_ * eps;
  r.first_order_applicable = r.fo_condition_value < 1.0;
  r.chang_first_order_dl_F = chang_l_F_ * eps;
  r.chang_first_order_du_F = chang_u_F_ * eps;
  r.chang_first_order_dl_S = chang_l_S_ * eps;
  r.chang_first_order_du_S = chang_u_S_ * eps;

  r.gamma_L_D = gamma_L_D_;
  r.gamma_U_D = gamma_U_D_;
  r.eta_DL = eta_DL_;
  r.eta_DU = eta_DU_;
  r.comparison_condition_value = r.fo_condition_value;
  r.comparison_applicable = r.comparison_condition_value < 0.25;
  if (r.comparison_applicable) {
    r.comparison_dl = 2.0 * gamma_L_D_ * l_fro_ * eps;
    r.comparison_du = 2.0 * gamma_U_D_ * u_fro_ * eps;
  }
  return r;
}

Matrix LuComponentwiseAnalysis::worst_case_m_norm_perturbation(double epsilon, FactorTarget target) const {
  const Matrix& y = target == FactorTarget::L ? yl_ : yu_;
  const Vector& ye = target == FactorTarget::L ? yl_e_ : yu_e_;
  Matrix da(n_, n_);
  if (ye.empty()) return da;
  const std::size_t k = static_cast<std::size_t>(std::max_element(ye.begin(), ye.end()) - ye.begin());
  const auto e = envelope_.data();
  auto out = da.data();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double yki = y(k, i);
    const double sign = yki > 0.0 ? 1.0 : (yki < 0.0 ? -1.0 : 0.0);
    out[i] = epsilon * sign * e[i];
  }
  return da;
}

LuComponentwiseReport lu_componentwise_bounds(const LuFactors& tilde, double epsilon, const ScalingMatrix& d_l,
                                              const ScalingMatrix& d_u) {
  return LuComponentwiseAnalysis(tilde, d_l, d_u).evaluate(epsilon);
}

Matrix worst_case_m_norm_perturbation(const LuFactors& tilde, double epsilon, FactorTarget target) {
  return LuComponentwiseAnalysis(tilde).worst_case_m_norm_perturbation(epsilon, target);
}

}  // namespace fperturb
