#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "fperturb/errors.hpp"
#include "fperturb/matrix.hpp"

namespace fperturb {

inline constexpr double kPivotTol = 1e-13;
inline constexpr double kRankTol = 1e-12;
inline constexpr double kReconstructTol = 1e-11;
/// Unit roundoff of IEEE double, 2^-53.
inline constexpr double kUnitRoundoff = 0x1p-53;

/// Pivot-free LU: L unit lower triangular, U upper triangular, A = L U.
struct LuFactors {
  Matrix L;
  Matrix U;
};

/// Thin QR with positive diagonal R: Q is m x n with orthonormal columns.
struct QrFactors {
  Matrix Q;
  Matrix R;
};

enum class NormKind { Spectral, Frobenius, MaxEntry, SumEntry };
enum class Triangle { Lower, Upper };

// Throws SingularLeadingMinor(k) when pivot k cancels to below
// kPivotTol times the magnitude of the terms it was accumulated from.
LuFactors lu_factor(const Matrix& a);

// Householder QR, reflectors skipped on already-zero subcolumns, then the
// sign of every R row (and Q column) is flipped so diag(R) > 0.
// Throws RankDeficient when |r_kk| <= kRankTol * ||A(:,k)||_2.
QrFactors qr_factor(const Matrix& a);

struct PowerIterationOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

struct SpectralEstimate {
  double sigma = 0.0;
  Vector right;  // unit dominant right singular vector estimate
  int iterations = 0;
};

/// Deterministic unit start vector used by every power iteration.
Vector power_start_vector(std::size_t dim);

/// Largest singular value of the map x -> apply(x) from R^input_dim, via power
/// iteration on the normal operator. `apply` and `apply_t` take a
/// std::span<const double> and return a Vector.
template <class Apply, class ApplyTranspose>
SpectralEstimate power_iteration(std::size_t input_dim, Apply&& apply,
                                 ApplyTranspose&& apply_t,
                                 const PowerIterationOptions& opts = {}) {
  SpectralEstimate est;
  if (input_dim == 0) return est;
  Vector v = power_start_vector(input_dim);
  double previous = 0.0;
  bool converged = false;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    const Vector u = apply(std::span<const double>(v));
    if (u.empty()) break;
    Vector w = apply_t(std::span<const double>(u));
    const double lambda = dot(u, u);
    const double wn = norm2(w);
    if (wn == 0.0 || lambda == 0.0) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
    if (it > 1 && std::fabs(lambda - previous) <= opts.tol * lambda) {
      converged = true;
      break;
    }
    previous = lambda;
  }
  if (!converged && it >= opts.max_iter) throw NoConvergence(it);
  // Rayleigh refinement with the last normalized iterate.
  const Vector u = apply(std::span<const double>(v));
  est.sigma = norm2(u);
  est.right = std::move(v);
  est.iterations = it;
  return est;
}

SpectralEstimate dominant_singular_pair(const Matrix& a, const PowerIterationOptions& opts = {});
double spectral_norm(const Matrix& a, const PowerIterationOptions& opts = {});
double frobenius_norm(const Matrix& a);
double norm(const Matrix& a, NormKind kind);
double norm(std::span<const double> x, NormKind kind);

/// All singular values in descending order, one-sided Jacobi. Used as the
/// dense oracle for the power-iteration estimates.
Vector singular_values(const Matrix& a);
double smallest_singular_value(const Matrix& a);

Matrix triangular_inverse(const Matrix& t, Triangle shape);

/// kappa_2(T) = ||T||_2 ||T^{-1}||_2 for a nonsingular triangular matrix.
double triangular_condition(const Matrix& t, Triangle shape);

}  // namespace fperturb
