#pragma once

// Shared helpers for the test binaries: random matrices and Eigen oracles.

#include <Eigen/Dense>

#include <cstdint>

#include "fperturb/dense.hpp"
#include "fperturb/matgen.hpp"
#include "fperturb/matrix.hpp"

namespace fperturb::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j)
    for (Eigen::Index i = 0; i < e.rows(); ++i) m(i, j) = e(i, j);
  return m;
}

/// Largest singular value from Eigen's Jacobi SVD.
inline double svd_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return svd.singularValues()(0);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

/// Random matrix whose pivot-free LU is comfortably defined: diagonally
/// dominant rows keep every pivot away from zero.
inline Matrix random_lu_friendly(std::size_t n, std::uint64_t seed) {
  Matrix m = random_matrix(n, n, seed);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += (m(i, i) >= 0 ? 1.0 : -1.0) * static_cast<double>(n);
  return m;
}

inline Matrix random_unit_lower(std::size_t n, std::uint64_t seed) {
  Matrix l = random_matrix(n, n, seed);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;
    l(j, j) = 1.0;
  }
  return l;
}

/// Upper triangular with positive diagonal bounded away from zero.
inline Matrix random_upper(std::size_t n, std::uint64_t seed) {
  Matrix r = random_matrix(n, n, seed);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) r(i, j) = 0.0;
    r(j, j) = 0.5 + std::abs(r(j, j));
  }
  return r;
}

}  // namespace fperturb::testing
