#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>

#include "fperturb/matrix.hpp"

namespace fperturb {

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the C++ standard; uniforms and normals are derived by hand
/// (53-bit mantissa fill, Marsaglia polar method) because the standard
/// distributions are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  /// Independent stream for one Monte Carlo trial.
  static RngStream for_trial(std::uint64_t seed, std::uint64_t trial);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// +1 or -1 with equal probability.
  double sign();

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// diag(1, s, ..., s^{n-1}) times the unit upper triangular matrix with -c
/// above the diagonal, c = cos(theta), s = sin(theta).
Matrix kahan(std::size_t n, double theta);

/// D1 B D2 with D1 = diag(d1^{i-1}), D2 = diag(d2^{j-1}) and B standard normal.
Matrix graded_random(std::size_t n, double d1, double d2, std::uint64_t seed);

/// Entries i.i.d. uniform on [0, 1].
Matrix random_c_matrix(std::size_t m, std::uint64_t seed);

struct Normwise {
  double delta = 0.0;
};
struct ComponentwiseLU {
  double epsilon = 0.0;
};
struct ComponentwiseQR {
  double epsilon = 0.0;
  Matrix C;
};
using PerturbationModel = std::variant<Normwise, ComponentwiseLU, ComponentwiseQR>;

struct PerturbationSpec {
  PerturbationModel model;
  std::uint64_t seed = 0;
};

/// Throws Error on negative sizes or C entries outside [0, 1].
void validate(const PerturbationSpec& spec);

/// Nonnegative envelope E with |dA| <= eps E: |L~||U~| of the pivot-free LU
/// of `a`, or C|a|. Throws for the normwise model, which has none.
Matrix perturbation_envelope(const PerturbationSpec& spec, const Matrix& a);

/// delta G / ||G||_F with G standard normal, so ||dA||_F = delta.
Matrix sample_normwise(std::size_t rows, std::size_t cols, double delta, RngStream& rng);

enum class MagnitudeMode {
  Uniform,  // |dA_ij| uniform on [0, eps E_ij]
  Extreme,  // |dA_ij| = eps E_ij
};

/// Random signs times magnitudes bounded by eps * envelope.
Matrix sample_within_envelope(const Matrix& envelope, double epsilon, RngStream& rng,
                              MagnitudeMode mode = MagnitudeMode::Uniform);

/// One draw of dA for `spec` around `a`, from the stream of `trial`.
Matrix sample_perturbation(const PerturbationSpec& spec, const Matrix& a, std::uint64_t trial = 0);

}  // namespace fperturb
