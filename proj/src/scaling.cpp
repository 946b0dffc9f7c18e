#include "fperturb/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fperturb/errors.hpp"

namespace fperturb {

ScalingMatrix::ScalingMatrix(Vector diagonal) : diag_(std::move(diagonal)) {
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    if (!std::isfinite(diag_[i]) || diag_[i] <= 0.0)
      throw Error("scaling entry " + std::to_string(i + 1) + " is not a positive finite number");
  }
}

ScalingMatrix ScalingMatrix::identity(std::size_t n) { return ScalingMatrix(Vector(n, 1.0)); }

double ScalingMatrix::zeta() const {
  double z = 0.0;
  // max_{i<j} d_j / d_i = max_j d_j / min_{i<j} d_i.
  double running_min = diag_.empty() ? 0.0 : diag_[0];
  for (std::size_t j = 1; j < diag_.size(); ++j) {
    z = std::max(z, diag_[j] / running_min);
    running_min = std::min(running_min, diag_[j]);
  }
  return z;
}

ScalingMatrix heuristic_scaling(const Matrix& m, ScalingMode mode) {
  const std::size_t count = mode == ScalingMode::Columns ? m.cols() : m.rows();
  Vector d(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (mode == ScalingMode::Columns) {
      d[k] = norm2(m.column(k));
    } else {
      Vector row(m.cols());
      for (std::size_t j = 0; j < m.cols(); ++j) row[j] = m(k, j);
      d[k] = norm2(row);
    }
    if (d[k] == 0.0) throw ZeroVector(k + 1);
  }
  return ScalingMatrix(std::move(d));
}

namespace {

void check(std::size_t dim, const ScalingMatrix& d) {
  if (dim != d.size()) throw DimensionMismatch("scaling size does not match matrix");
}

}  // namespace

Matrix scale_rows(const ScalingMatrix& d, const Matrix& m) {
  check(m.rows(), d);
  Matrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) *= d.diagonal()[i];
  return out;
}

Matrix scale_rows_inverse(const ScalingMatrix& d, const Matrix& m) {
  check(m.rows(), d);
  Matrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) /= d.diagonal()[i];
  return out;
}

Matrix scale_cols(const Matrix& m, const ScalingMatrix& d) {
  check(m.cols(), d);
  Matrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) *= d.diagonal()[j];
  return out;
}

Matrix scale_cols_inverse(const Matrix& m, const ScalingMatrix& d) {
  check(m.cols(), d);
  Matrix out = m;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) /= d.diagonal()[j];
  return out;
}

}  // namespace fperturb
