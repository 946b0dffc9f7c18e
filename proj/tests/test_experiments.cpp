#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fperturb/errors.hpp"
#include "fperturb/experiments.hpp"
#include "fperturb/matgen.hpp"
#include "support.hpp"

using namespace fperturb;

namespace {

bool same_checks(const VerificationReport& a, const VerificationReport& b) {
  if (a.checks.size() != b.checks.size()) return false;
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    const BoundCheck& x = a.checks[i];
    const BoundCheck& y = b.checks[i];
    if (x.name != y.name || x.checked != y.checked || x.violations != y.violations || x.max_ratio != y.max_ratio)
      return false;
  }
  return a.violations == b.violations && a.completed == b.completed;
}

}  // namespace

TEST(ExperimentNames, RoundTrip) {
  for (Experiment e :
       {Experiment::LuNormwise, Experiment::LuComponentwise, Experiment::QrNormwise, Experiment::QrComponentwise})
    EXPECT_EQ(parse_experiment(experiment_name(e)), e);
  EXPECT_FALSE(parse_experiment("cholesky").has_value());
}

TEST(Verify, ZeroSizeGivesZeroChange) {
  const Matrix a = fperturb::testing::random_lu_friendly(4, 3);
  const VerificationReport r = verify_bounds(a, Experiment::LuNormwise, {Normwise{0.0}, 1}, 10);
  EXPECT_EQ(r.completed, 10u);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.max_ratio_rigorous, 0.0);
}

TEST(Verify, IdentityAtTheConditionLimit) {
  const VerificationReport r =
      verify_bounds(Matrix::identity(4), Experiment::LuNormwise, {Normwise{3.0 / 16.0}, 2}, 200);
  ASSERT_TRUE(r.applicable);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_LE(r.max_ratio_rigorous, 1.0);
}

TEST(Verify, IdentityQrNormwise) {
  const VerificationReport r =
      verify_bounds(Matrix::identity(10), Experiment::QrNormwise, {Normwise{0.1}, 3}, 100);
  ASSERT_TRUE(r.applicable);
  EXPECT_EQ(r.completed, 100u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(Verify, ComponentwiseModelsHoldOnKahan) {
  const Matrix a = kahan(8, std::numbers::pi / 8);
  const VerifyOptions opts{0, MagnitudeMode::Extreme};
  const VerificationReport lu = verify_bounds(a, Experiment::LuComponentwise, {ComponentwiseLU{1e-8}, 4}, 100, opts);
  ASSERT_TRUE(lu.applicable);
  EXPECT_EQ(lu.violations, 0u);
  const VerificationReport qr = verify_bounds(
      a, Experiment::QrComponentwise, {ComponentwiseQR{1e-12, random_c_matrix(8, 5)}, 4}, 100, opts);
  ASSERT_TRUE(qr.applicable);
  EXPECT_EQ(qr.violations, 0u);
}

TEST(Verify, ResultsIndependentOfThreadCount) {
  const Matrix a = graded_random(6, 0.5, 1.0, 7);
  const PerturbationSpec spec{ComponentwiseLU{1e-9}, 8};
  const VerificationReport one = verify_bounds(a, Experiment::LuComponentwise, spec, 64, {1, MagnitudeMode::Uniform});
  const VerificationReport four = verify_bounds(a, Experiment::LuComponentwise, spec, 64, {4, MagnitudeMode::Uniform});
  EXPECT_TRUE(same_checks(one, four));
}

TEST(Verify, ModelMismatchThrows) {
  const Matrix a = Matrix::identity(3);
  EXPECT_THROW(verify_bounds(a, Experiment::QrNormwise, {ComponentwiseLU{1e-8}, 1}, 1), Error);
  EXPECT_THROW(verify_bounds(a, Experiment::LuComponentwise, {Normwise{0.1}, 1}, 1), Error);
}

TEST(Verify, EveryTrialIsAccountedFor) {
  // Far outside the condition: every trial either completes or is reported as skipped.
  const VerificationReport r = verify_bounds(Matrix::identity(2), Experiment::LuNormwise, {Normwise{50.0}, 9}, 50);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.completed + r.skipped.size(), 50u);
}

TEST(Verify, ExactlySingularPerturbationIsSkipped) {
  // A = [[1, 0], [0, 1]] with the envelope C|A| and C = [[1, 0], [0, 0]] at
  // eps = 1 in extreme mode gives dA(0, 0) = +-1: half the draws zero column 1.
  const Matrix c = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  const VerificationReport r = verify_bounds(Matrix::identity(2), Experiment::QrComponentwise,
                                             {ComponentwiseQR{1.0, c}, 3}, 40, {1, MagnitudeMode::Extreme});
  EXPECT_FALSE(r.skipped.empty());
  EXPECT_EQ(r.completed + r.skipped.size(), 40u);
  for (const SkippedTrial& s : r.skipped) EXPECT_FALSE(s.reason.empty());
}

TEST(Trends, NormwiseLuApproachesFirstOrder) {
  const Matrix a = graded_random(6, 0.8, 1.0, 2);
  const std::vector<FirstOrderTrend> t = first_order_trends(a, Experiment::LuNormwise, {Normwise{1e-4}, 1}, 4);
  ASSERT_FALSE(t.empty());
  for (const FirstOrderTrend& tr : t) {
    ASSERT_EQ(tr.sizes.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_DOUBLE_EQ(tr.sizes[k], 1e-4 / std::pow(2.0, double(k)));
      EXPECT_NEAR(tr.ratios[k], 1.0, 50 * tr.sizes[k] + 1e-6) << tr.bound;
    }
  }
}

TEST(Trends, ComponentwiseLuMaxNormIsTight) {
  const Matrix a = fperturb::testing::random_lu_friendly(6, 3);
  const std::vector<FirstOrderTrend> t =
      first_order_trends(a, Experiment::LuComponentwise, {ComponentwiseLU{1e-6}, 1}, 4);
  bool saw_m = false;
  for (const FirstOrderTrend& tr : t) {
    if (tr.bound.ends_with("_M")) {
      saw_m = true;
      EXPECT_GT(tr.ratios.back(), 0.9) << tr.bound;
      EXPECT_LE(tr.ratios.back(), 1.0 + 50 * tr.sizes.back()) << tr.bound;
    }
  }
  EXPECT_TRUE(saw_m);
}
