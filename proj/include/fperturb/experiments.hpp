#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fperturb/matgen.hpp"
#include "fperturb/matrix.hpp"

namespace fperturb {

enum class Experiment { LuNormwise, LuComponentwise, QrNormwise, QrComponentwise };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Worker count: FPERTURB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

enum class BoundKind { Rigorous, FirstOrder, Comparison };

/// Actual factor change against one bound, across all trials.
struct BoundCheck {
  std::string name;
  BoundKind kind = BoundKind::Rigorous;
  std::size_t checked = 0;
  std::size_t violations = 0;  // actual > bound
  double max_ratio = 0.0;      // max actual / bound
};

struct SkippedTrial {
  std::size_t trial = 0;
  std::string reason;
};

struct VerificationReport {
  Experiment experiment = Experiment::LuNormwise;
  double size = 0.0;  // delta or epsilon
  std::size_t trials = 0;
  std::size_t completed = 0;
  bool applicable = false;  // applicability condition of the rigorous bounds
  double condition_value = 0.0;
  std::size_t violations = 0;  // violations of the rigorous bounds only
  double max_ratio_rigorous = 0.0;
  double max_ratio_first_order = 0.0;
  std::vector<BoundCheck> checks;
  std::vector<SkippedTrial> skipped;
  double seconds_analysis = 0.0;
  double seconds_trials = 0.0;
};

struct VerifyOptions {
  unsigned threads = 0;  // 0: default_thread_count()
  MagnitudeMode magnitude = MagnitudeMode::Uniform;
};

/// Samples `trials` perturbations from `spec` (stream per trial index),
/// refactorizes in quad precision and compares the actual factor change
/// with every bound of the matching report. Normwise specs need `experiment`
/// to pick LU or QR; componentwise specs must agree with it.
///
/// Componentwise LU treats `a` as the computed factorization's source: with
/// L~, U~ = lu(a) the reference matrix is L~ U~ and the perturbed one is
/// L~ U~ - dA. Everything else perturbs `a` to `a + dA`.
VerificationReport verify_bounds(const Matrix& a, Experiment experiment, const PerturbationSpec& spec,
                                 std::size_t trials, const VerifyOptions& options = {});

/// Ratio actual / first-order bound along one fixed perturbation direction,
/// with the size halved at every level.
struct FirstOrderTrend {
  std::string bound;
  std::vector<double> sizes;
  std::vector<double> ratios;
};

/// Deterministic worst-case style directions: the dominant right singular
/// vector of Y_L / Y_U / G_R for the normwise bounds, the max-entry attaining
/// sign pattern for componentwise LU, and a fixed full-magnitude sign pattern
/// for componentwise QR. `levels` sizes are start, start/2, ...
std::vector<FirstOrderTrend> first_order_trends(const Matrix& a, Experiment experiment, const PerturbationSpec& start,
                                                std::size_t levels);

}  // namespace fperturb
