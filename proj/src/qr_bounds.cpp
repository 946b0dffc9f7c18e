#include "fperturb/qr_bounds.hpp"

#include <chrono>
#include <cmath>

namespace fperturb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_r(const Matrix& r) {
  if (!r.is_square()) throw DimensionMismatch("R must be square");
}

double two(const Matrix& m) { return spectral_norm(m); }

}  // namespace

StructuredOperator build_gr(const Matrix& r) {
  check_r(r);
  const std::size_t n = r.rows();
  const Matrix r_inv_t = triangular_inverse(r, Triangle::Upper).transposed();
  const Matrix eye = Matrix::identity(n);
  StructuredOperator inner = StructuredOperator::sum(
      {StructuredOperator::kron(r_inv_t, eye),
       StructuredOperator::kron(eye, r_inv_t) * StructuredOperator::vec_permutation(n, n)});
  return StructuredOperator::select(SelectionKind::Uvec, n) * StructuredOperator::kron(r.transposed(), eye) *
         StructuredOperator::select(SelectionKind::Up, n) * inner;
}

StructuredOperator build_hr(const Matrix& r) {
  check_r(r);
  const std::size_t n = r.rows();
  const Matrix r_inv_t = triangular_inverse(r, Triangle::Upper).transposed();
  return StructuredOperator::select(SelectionKind::Uvec, n) *
         StructuredOperator::kron(r.transposed(), Matrix::identity(n)) *
         StructuredOperator::select(SelectionKind::Up, n) * StructuredOperator::kron(r_inv_t, r_inv_t);
}

ScalingMatrix scaling_d_r(const Matrix& r) { return heuristic_scaling(r, ScalingMode::Rows); }

ScalingMatrix scaling_d_e(const Matrix& r) {
  check_r(r);
  const std::size_t n = r.rows();
  const Matrix r_inv = triangular_inverse(r, Triangle::Upper);
  Vector row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) row_sums[i] += std::fabs(r(i, j));
  const Matrix m = scale_rows(ScalingMatrix(row_sums), r_inv);
  Vector d(n);
  double previous = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double cn = norm2(m.column(j));
    d[j] = (j == 0 || cn >= previous) ? 1.0 / cn : d[j - 1];
    previous = cn;
  }
  return ScalingMatrix(std::move(d));
}

std::vector<NamedScaling> default_qr_scalings(const Matrix& r) {
  return {{"Dr", scaling_d_r(r)}, {"De", scaling_d_e(r)}};
}

ChangStehleQrBound chang_stehle_qr(const Matrix& r, double delta_or_eps, QrModel model, const ScalingMatrix& d,
                                   const Matrix& c, const Matrix& q) {
  check_r(r);
  ChangStehleQrBound out;
  out.zeta = d.zeta();
  const double lead = kChangStehleConstant * std::sqrt(1.0 + out.zeta * out.zeta);
  const Matrix r_inv = triangular_inverse(r, Triangle::Upper);
  if (model == QrModel::Normwise) {
    out.coefficient = lead * triangular_condition(scale_rows_inverse(d, r), Triangle::Upper);
    out.condition_value = two(r_inv) * delta_or_eps;
  } else {
    if (c.rows() != q.rows() || !c.is_square()) throw DimensionMismatch("C must be m x m with Q m x n");
    const Matrix rr = abs(r) * abs(r_inv);
    const double cq = frobenius_norm(c * abs(q));
    out.coefficient = lead * two(scale_rows_inverse(d, r)) * two(scale_cols(rr, d)) * cq;
    out.condition_value = two(rr) * cq * delta_or_eps;
  }
  out.applicable = out.condition_value < kChangStehleLimit;
  if (out.applicable) out.bound = out.coefficient * delta_or_eps;
  return out;
}

QrNormwiseAnalysis::QrNormwiseAnalysis(const QrFactors& f) : QrNormwiseAnalysis(f, default_qr_scalings(f.R)) {}

QrNormwiseAnalysis::QrNormwiseAnalysis(const QrFactors& f, std::vector<NamedScaling> scalings)
    : scalings_(std::move(scalings)) {
  SpectralEstimate gr = operator_spectral_estimate(build_gr(f.R));
  gr_norm_ = gr.sigma;
  gr_dir_ = std::move(gr.right);
  hr_norm_ = operator_spectral_norm(build_hr(f.R));
  r_inv_norm_ = two(triangular_inverse(f.R, Triangle::Upper));
  for (const NamedScaling& s : scalings_)
    kappas_.push_back(triangular_condition(scale_rows_inverse(s.d, f.R), Triangle::Upper));
}

QrNormwiseReport QrNormwiseAnalysis::evaluate(double delta1, double delta2) const {
  if (!(delta1 >= 0.0) || !(delta2 >= 0.0) || !std::isfinite(delta1) || !std::isfinite(delta2))
    throw Error("delta1 and delta2 must be finite nonnegative numbers");
  QrNormwiseReport r;
  r.gr_norm = gr_norm_;
  r.hr_norm = hr_norm_;
  r.delta1 = delta1;
  r.delta2 = delta2;
  r.condition_value = hr_norm_ * (gr_norm_ * delta2 + hr_norm_ * delta2 * delta2);
  r.strengthened_condition_value = hr_norm_ * (1.0 + 2.0 * gr_norm_) * delta2;
  r.applicable = r.condition_value < 0.25;
  r.strengthened_applicable = r.strengthened_condition_value < 0.5;
  if (r.applicable) {
    const double core = gr_norm_ * delta1 + hr_norm_ * delta2 * delta2;
    r.rigorous_dr = 2.0 * core / (1.0 + std::sqrt(1.0 - 4.0 * hr_norm_ * core));
    r.relaxed_dr = 2.0 * core;
    r.simple_dr = (1.0 + 2.0 * gr_norm_) * delta2;
  }
  r.first_order_dr = gr_norm_ * delta1;
  r.fo_condition_value = r_inv_norm_ * delta2;
  r.first_order_applicable = r.fo_condition_value < 1.0;
  for (std::size_t i = 0; i < scalings_.size(); ++i) {
    ChangStehleQrBound b;
    b.name = scalings_[i].name;
    b.zeta = scalings_[i].d.zeta();
    b.coefficient = kChangStehleConstant * std::sqrt(1.0 + b.zeta * b.zeta) * kappas_[i];
    b.condition_value = r.fo_condition_value;
    b.applicable = b.condition_value < kChangStehleLimit;
    if (b.applicable) b.bound = b.coefficient * delta2;
    r.comparisons.push_back(std::move(b));
  }
  return r;
}

QrNormwiseReport qr_normwise_bounds(const QrFactors& f, double delta1, double delta2) {
  return QrNormwiseAnalysis(f).evaluate(delta1, delta2);
}

QrComponentwiseAnalysis::QrComponentwiseAnalysis(const QrFactors& f, const Matrix& c, std::size_t threshold)
    : QrComponentwiseAnalysis(f, c, default_qr_scalings(f.R), threshold) {}

QrComponentwiseAnalysis::QrComponentwiseAnalysis(const QrFactors& f, const Matrix& c,
                                                 std::vector<NamedScaling> scalings, std::size_t threshold) {
  const Matrix& r = f.R;
  check_r(r);
  if (!c.is_square() || c.rows() != f.Q.rows()) throw DimensionMismatch("C must be m x m for an m x n matrix");
  for (double v : c.data())
    if (!(v >= 0.0 && v <= 1.0)) throw Error("C entries must lie in [0, 1]");
  const std::size_t n = r.rows();

  const Matrix abs_q = abs(f.Q);
  const Matrix c_abs_q = c * abs_q;
  cq_F_ = frobenius_norm(c_abs_q);
  qcq_F_ = frobenius_norm(abs_q.transposed() * c_abs_q);
  const Matrix cc = c.transposed() * c;
  qccq_F_ = frobenius_norm(abs_q.transposed() * (cc * abs_q));
  const Matrix abs_r = abs(r);
  const Matrix abs_r_t = abs_r.transposed();
  const Matrix r_inv = triangular_inverse(r, Triangle::Upper);
  const Matrix rr = abs_r * abs(r_inv);  // |R||R^-1|
  r_2_ = two(r);
  rr_inv_ = two(rr);

  auto start = Clock::now();
  abs_r_ = two(abs_r);
  const StructuredOperator abs_gr = abs(build_gr(r), threshold);
  a_op_ = operator_spectral_norm(abs_gr * StructuredOperator::kron(abs_r_t, Matrix::identity(n)));
  t_gamma_ = seconds_since(start);

  const StructuredOperator abs_hr = abs(build_hr(r), threshold);
  c_t_ = operator_spectral_norm(abs_hr);
  b_op_ = operator_spectral_norm(abs_hr * StructuredOperator::kron(abs_r_t, abs_r_t));

  for (NamedScaling& s : scalings) {
    start = Clock::now();
    QrScaledQuantities q;
    q.name = std::move(s.name);
    q.zeta = s.d.zeta();
    const double root = std::sqrt(1.0 + q.zeta * q.zeta);
    const double xr = two(scale_rows_inverse(s.d, r));
    const double rrx = two(scale_cols(rr, s.d));
    q.gamma = kChangStehleConstant * root * xr * rrx * cq_F_ / r_2_;
    t_scaled_.push_back(seconds_since(start));
    const double xabs = two(scale_rows_inverse(s.d, abs_r));
    q.eta = xabs / xr;
    q.sandwich_upper = root * xabs * rrx;
    q.gr_upper = root * triangular_condition(scale_rows_inverse(s.d, r), Triangle::Upper);
    scaled_.push_back(std::move(q));
  }
}

QrComponentwiseReport QrComponentwiseAnalysis::evaluate(double epsilon) const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw Error("epsilon must be a finite nonnegative number");
  const double eps = epsilon;
  QrComponentwiseReport r;
  r.epsilon = eps;
  r.a_t = a_op_ * qcq_F_;
  r.b_t = b_op_ * qccq_F_;
  r.c_t = c_t_;
  const double core = r.a_t * eps + r.b_t * eps * eps;
  const double simple_coeff = abs_r_ * cq_F_ + 2.0 * r.a_t;
  r.condition_value = r.c_t * core;
  r.strengthened_value = r.c_t * simple_coeff * eps;
  r.applicable = r.condition_value < 0.25;
  r.strengthened_applicable = r.strengthened_value < 0.5;
  if (r.applicable) {
    r.rigorous_dr = 2.0 * core / (1.0 + std::sqrt(1.0 - 4.0 * r.condition_value));
    r.relaxed_dr = 2.0 * core;
    r.simple_dr = simple_coeff * eps;
  }
  r.first_order_dr = r.a_t * eps;
  r.fo_condition_value = rr_inv_ * cq_F_ * eps;
  r.first_order_applicable = r.fo_condition_value < 1.0;
  r.comparison_condition_value = r.fo_condition_value;
  r.comparison_applicable = r.comparison_condition_value < kChangStehleLimit;

  r.q_ratio = cq_F_ > 0.0 ? qcq_F_ / cq_F_ : 0.0;
  r.gamma_R = simple_coeff / r_2_;
  r.abs_gr_scaled = a_op_;
  r.abs_r_norm = abs_r_;
  r.scaled = scaled_;
  for (QrScaledQuantities& q : r.scaled) {
    if (r.comparison_applicable) q.comparison_dr = q.gamma * r_2_ * eps;
  }
  return r;
}

QrComponentwiseReport qr_componentwise_bounds(const QrFactors& f, const Matrix& c, double epsilon,
                                              std::vector<NamedScaling> scalings) {
  return QrComponentwiseAnalysis(f, c, std::move(scalings)).evaluate(epsilon);
}

}  // namespace fperturb
