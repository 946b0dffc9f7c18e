#include "fperturb/dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fperturb {

LuFactors lu_factor(const Matrix& a) {
  if (!a.is_square()) throw DimensionMismatch("lu_factor requires a square matrix");
  const std::size_t n = a.rows();
  Matrix w = a;
  // mag(i,j) accumulates |a_ij| + sum |l_ik||u_kj| alongside the elimination.
  Matrix mag = abs(a);
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = w(k, k);
    if (pivot == 0.0 || std::fabs(pivot) <= kPivotTol * mag(k, k)) throw SingularLeadingMinor(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) w(i, k) /= pivot;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double ukj = w(k, j);
      const double aukj = std::fabs(ukj);
      for (std::size_t i = k + 1; i < n; ++i) {
        w(i, j) -= w(i, k) * ukj;
        mag(i, j) += std::fabs(w(i, k)) * aukj;
      }
    }
  }
  LuFactors f{Matrix::identity(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) f.U(i, j) = w(i, j);
    for (std::size_t i = j + 1; i < n; ++i) f.L(i, j) = w(i, j);
  }
  return f;
}

QrFactors qr_factor(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw DimensionMismatch("qr_factor requires rows >= cols");
  Vector col_norms(n);
  for (std::size_t j = 0; j < n; ++j) col_norms[j] = norm2(a.column(j));

  Matrix w = a;
  Vector tau(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = w(k, k);
    double tail = 0.0;
    {
      Vector sub(m - k - 1);
      for (std::size_t i = k + 1; i < m; ++i) sub[i - k - 1] = w(i, k);
      tail = norm2(sub);
    }
    if (tail == 0.0) {
      tau[k] = 0.0;
    } else {
      const double beta = -std::copysign(std::hypot(alpha, tail), alpha);
      tau[k] = (beta - alpha) / beta;
      const double scale = 1.0 / (alpha - beta);
      for (std::size_t i = k + 1; i < m; ++i) w(i, k) *= scale;
      w(k, k) = beta;
      // Apply H = I - tau v v^T with v = [1; w(k+1:m, k)] to trailing columns.
      for (std::size_t j = k + 1; j < n; ++j) {
        double s = w(k, j);
        for (std::size_t i = k + 1; i < m; ++i) s += w(i, k) * w(i, j);
        s *= tau[k];
        w(k, j) -= s;
        for (std::size_t i = k + 1; i < m; ++i) w(i, j) -= s * w(i, k);
      }
    }
    if (std::fabs(w(k, k)) <= kRankTol * col_norms[k]) throw RankDeficient(k + 1);
  }

  QrFactors f{Matrix(m, n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) f.R(i, j) = w(i, j);
  for (std::size_t j = 0; j < n; ++j) f.Q(j, j) = 1.0;
  // Accumulate Q = H_0 H_1 ... H_{n-1} [I_n; 0] backwards.
  for (std::size_t kk = n; kk-- > 0;) {
    if (tau[kk] == 0.0) continue;
    for (std::size_t j = kk; j < n; ++j) {
      double s = f.Q(kk, j);
      for (std::size_t i = kk + 1; i < m; ++i) s += w(i, kk) * f.Q(i, j);
      s *= tau[kk];
      f.Q(kk, j) -= s;
      for (std::size_t i = kk + 1; i < m; ++i) f.Q(i, j) -= s * w(i, kk);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (f.R(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < n; ++j) f.R(k, j) = -f.R(k, j);
    for (std::size_t i = 0; i < m; ++i) f.Q(i, k) = -f.Q(i, k);
  }
  return f;
}

Vector power_start_vector(std::size_t dim) {
  // All-ones with a small golden-ratio jitter so no structured operator can
  // annihilate the start vector by symmetry.
  constexpr double kGolden = 0.6180339887498949;
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double frac = std::fmod(static_cast<double>(i + 1) * kGolden, 1.0);
    v[i] = 1.0 + 0.25 * frac;
  }
  const double nv = norm2(v);
  for (double& x : v) x /= nv;
  return v;
}

SpectralEstimate dominant_singular_pair(const Matrix& a, const PowerIterationOptions& opts) {
  if (a.empty()) return {};
  const Matrix at = a.transposed();
  return power_iteration(
      a.cols(), [&](std::span<const double> x) { return a * x; },
      [&](std::span<const double> y) { return at * y; }, opts);
}

double spectral_norm(const Matrix& a, const PowerIterationOptions& opts) {
  return dominant_singular_pair(a, opts).sigma;
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

double norm(std::span<const double> x, NormKind kind) {
  switch (kind) {
    case NormKind::Frobenius:
    case NormKind::Spectral:
      return norm2(x);
    case NormKind::MaxEntry: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::fabs(v));
      return m;
    }
    case NormKind::SumEntry: {
      double s = 0.0;
      for (double v : x) s += std::fabs(v);
      return s;
    }
  }
  return 0.0;
}

double norm(const Matrix& a, NormKind kind) {
  if (kind == NormKind::Spectral) return spectral_norm(a);
  return norm(a.data(), kind);
}

Vector singular_values(const Matrix& input) {
  if (input.empty()) return {};
  Matrix a = input.rows() >= input.cols() ? input : input.transposed();
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* ap = a.data().data() + p * m;
        double* aq = a.data().data() + q * m;
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += ap[i] * ap[i];
          beta += aq[i] * aq[i];
          gamma += ap[i] * aq[i];
        }
        if (gamma == 0.0 || std::fabs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = ap[i];
          const double y = aq[i];
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  Vector sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm2(a.column(j));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double smallest_singular_value(const Matrix& a) {
  const Vector sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.back();
}

Matrix triangular_inverse(const Matrix& t, Triangle shape) {
  if (!t.is_square()) throw DimensionMismatch("triangular_inverse requires a square matrix");
  const std::size_t n = t.rows();
  for (std::size_t k = 0; k < n; ++k)
    if (t(k, k) == 0.0) throw SingularDiagonal(k + 1);
  Matrix x(n, n);
  if (shape == Triangle::Upper) {
    for (std::size_t j = 0; j < n; ++j) {
      x(j, j) = 1.0 / t(j, j);
      for (std::size_t i = j; i-- > 0;) {
        double s = 0.0;
        for (std::size_t k = i + 1; k <= j; ++k) s += t(i, k) * x(k, j);
        x(i, j) = -s / t(i, i);
      }
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      x(j, j) = 1.0 / t(j, j);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = j; k < i; ++k) s += t(i, k) * x(k, j);
        x(i, j) = -s / t(i, i);
      }
    }
  }
  return x;
}

double triangular_condition(const Matrix& t, Triangle shape) {
  return spectral_norm(t) * spectral_norm(triangular_inverse(t, shape));
}

}  // namespace fperturb
