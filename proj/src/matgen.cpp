#include "fperturb/matgen.hpp"

#include <cmath>

#include "fperturb/dense.hpp"
#include "fperturb/errors.hpp"

namespace fperturb {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Stream 0 belongs to the constructor; trial t uses stream t + 1.
constexpr std::uint64_t kBaseStream = 0;

}  // namespace

RngStream::RngStream(std::uint64_t seed) : RngStream(seed, kBaseStream) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : engine_(seeded_engine(seed, stream)) {}

RngStream RngStream::for_trial(std::uint64_t seed, std::uint64_t trial) { return RngStream(seed, trial + 1); }

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RngStream::sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

Matrix kahan(std::size_t n, double theta) {
  if (n == 0) throw Error("kahan requires n >= 1");
  if (!(theta > 0.0 && theta < M_PI / 2)) throw Error("kahan requires 0 < theta < pi/2");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix a(n, n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = scale;
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = -c * scale;
    scale *= s;
  }
  return a;
}

Matrix graded_random(std::size_t n, double d1, double d2, std::uint64_t seed) {
  if (n == 0) throw Error("graded_random requires n >= 1");
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error("graded_random requires positive grading factors");
  RngStream rng(seed);
  Matrix b(n, n);
  for (double& x : b.data()) x = rng.normal();
  double col_scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double row_scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      b(i, j) *= row_scale * col_scale;
      row_scale *= d1;
    }
    col_scale *= d2;
  }
  return b;
}

Matrix random_c_matrix(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error("random_c_matrix requires m >= 1");
  RngStream rng(seed);
  Matrix c(m, m);
  for (double& x : c.data()) x = rng.uniform();
  return c;
}

void validate(const PerturbationSpec& spec) {
  std::visit(
      [](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, Normwise>) {
          if (!(model.delta >= 0.0) || !std::isfinite(model.delta)) throw Error("delta must be finite and >= 0");
        } else {
          if (!(model.epsilon >= 0.0) || !std::isfinite(model.epsilon))
            throw Error("epsilon must be finite and >= 0");
          if constexpr (std::is_same_v<T, ComponentwiseQR>) {
            if (!model.C.is_square()) throw DimensionMismatch("C must be square");
            for (double v : model.C.data())
              if (!(v >= 0.0 && v <= 1.0)) throw Error("C entries must lie in [0, 1]");
          }
        }
      },
      spec.model);
}

Matrix perturbation_envelope(const PerturbationSpec& spec, const Matrix& a) {
  if (std::holds_alternative<ComponentwiseLU>(spec.model)) {
    const LuFactors f = lu_factor(a);
    return abs(f.L) * abs(f.U);
  }
  if (const auto* qr = std::get_if<ComponentwiseQR>(&spec.model)) {
    if (qr->C.rows() != a.rows() || !qr->C.is_square()) throw DimensionMismatch("C must be m x m");
    return qr->C * abs(a);
  }
  throw Error("the normwise model has no entrywise envelope");
}

Matrix sample_normwise(std::size_t rows, std::size_t cols, double delta, RngStream& rng) {
  Matrix g(rows, cols);
  if (delta == 0.0 || g.empty()) return g;
  for (double& x : g.data()) x = rng.normal();
  const double scale = delta / frobenius_norm(g);
  for (double& x : g.data()) x *= scale;
  return g;
}

Matrix sample_within_envelope(const Matrix& envelope, double epsilon, RngStream& rng, MagnitudeMode mode) {
  Matrix d(envelope.rows(), envelope.cols());
  const auto e = envelope.data();
  auto out = d.data();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double s = rng.sign();
    const double t = mode == MagnitudeMode::Uniform ? rng.uniform() : 1.0;
    out[i] = s * t * (epsilon * e[i]);
  }
  return d;
}

Matrix sample_perturbation(const PerturbationSpec& spec, const Matrix& a, std::uint64_t trial) {
  validate(spec);
  RngStream rng = RngStream::for_trial(spec.seed, trial);
  if (const auto* nw = std::get_if<Normwise>(&spec.model)) return sample_normwise(a.rows(), a.cols(), nw->delta, rng);
  const double eps = std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Normwise>) return m.delta;
        else return m.epsilon;
      },
      spec.model);
  return sample_within_envelope(perturbation_envelope(spec, a), eps, rng);
}

}  // namespace fperturb
