#pragma once

// Quad-precision factorizations used as the "exact" side of Monte Carlo
// checks, so that the measured factor change is not swamped by rounding in
// the refactorization itself, even for perturbations near 1e-16.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "fperturb/matrix.hpp"

namespace fperturb::reference {

__extension__ typedef __float128 Real;

/// Unit roundoff of Real (113-bit significand).
inline constexpr double kUnitRoundoff = 0x1p-113;

inline Real sqrt(Real x) {
  if (x <= 0) return 0;
  Real y = std::sqrt(static_cast<long double>(x));
  y = (y + x / y) / 2;
  y = (y + x / y) / 2;
  return y;
}

struct XMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Real> a;

  XMatrix() = default;
  XMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Real(0)) {}
  explicit XMatrix(const Matrix& m) : rows(m.rows()), cols(m.cols()), a(m.data().begin(), m.data().end()) {}

  Real& operator()(std::size_t i, std::size_t j) { return a[j * rows + i]; }
  Real operator()(std::size_t i, std::size_t j) const { return a[j * rows + i]; }
};

inline XMatrix sum(const Matrix& x, const Matrix& y, Real sign_y = Real(1)) {
  XMatrix out(x);
  const auto yd = y.data();
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += sign_y * static_cast<Real>(yd[i]);
  return out;
}

inline XMatrix product(const Matrix& x, const Matrix& y) {
  XMatrix out(x.rows(), y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const Real ykj = y(k, j);
      if (ykj == Real(0)) continue;
      for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) += static_cast<Real>(x(i, k)) * ykj;
    }
  return out;
}

struct XLu {
  XMatrix L;
  XMatrix U;
};

/// Pivot-free LU; nullopt on an exactly zero pivot.
inline std::optional<XLu> lu(XMatrix w) {
  const std::size_t n = w.rows;
  for (std::size_t k = 0; k < n; ++k) {
    const Real pivot = w(k, k);
    if (pivot == Real(0)) return std::nullopt;
    for (std::size_t i = k + 1; i < n; ++i) w(i, k) /= pivot;
    for (std::size_t j = k + 1; j < n; ++j) {
      const Real ukj = w(k, j);
      for (std::size_t i = k + 1; i < n; ++i) w(i, j) -= w(i, k) * ukj;
    }
  }
  XLu f{XMatrix(n, n), XMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    f.L(j, j) = Real(1);
    for (std::size_t i = 0; i <= j; ++i) f.U(i, j) = w(i, j);
    for (std::size_t i = j + 1; i < n; ++i) f.L(i, j) = w(i, j);
  }
  return f;
}

/// R factor of a Householder QR with positive diagonal; nullopt when a
/// diagonal entry is exactly zero.
inline std::optional<XMatrix> qr_r(XMatrix w) {
  const std::size_t m = w.rows;
  const std::size_t n = w.cols;
  for (std::size_t k = 0; k < n; ++k) {
    Real tail = Real(0);
    for (std::size_t i = k; i < m; ++i) tail += w(i, k) * w(i, k);
    const Real norm = sqrt(tail);
    if (norm == Real(0)) return std::nullopt;
    const Real alpha = w(k, k);
    const Real beta = alpha >= Real(0) ? -norm : norm;
    // v = x - beta e1, H = I - 2 v v^T / (v^T v).
    std::vector<Real> v(m - k);
    v[0] = alpha - beta;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = w(i, k);
    Real vv = Real(0);
    for (Real x : v) vv += x * x;
    for (std::size_t j = k; j < n; ++j) {
      Real s = Real(0);
      for (std::size_t i = k; i < m; ++i) s += v[i - k] * w(i, j);
      s = Real(2) * s / vv;
      for (std::size_t i = k; i < m; ++i) w(i, j) -= s * v[i - k];
    }
  }
  XMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Real sgn = w(i, i) < Real(0) ? -Real(1) : Real(1);
    for (std::size_t j = i; j < n; ++j) r(i, j) = sgn * w(i, j);
  }
  return r;
}

/// ||x - y||_F for same-shaped matrices.
inline double distance(const XMatrix& x, const XMatrix& y) {
  Real s = Real(0);
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    const Real d = x.a[i] - y.a[i];
    s += d * d;
  }
  return static_cast<double>(sqrt(s));
}

inline std::vector<double> difference(const XMatrix& x, const XMatrix& y) {
  std::vector<double> d(x.a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(x.a[i] - y.a[i]);
  return d;
}

}  // namespace fperturb::reference
