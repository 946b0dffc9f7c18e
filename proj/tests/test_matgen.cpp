#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fperturb/dense.hpp"
#include "fperturb/errors.hpp"
#include "fperturb/matgen.hpp"
#include "support.hpp"

using namespace fperturb;

TEST(Kahan, SizeOne) { EXPECT_EQ(kahan(1, 0.3), Matrix::from_rows({{1.0}})); }

TEST(Kahan, SizeTwo) {
  const double theta = std::numbers::pi / 3;
  const Matrix k = kahan(2, theta);
  EXPECT_DOUBLE_EQ(k(0, 0), 1.0);
  EXPECT_NEAR(k(0, 1), -0.5, 1e-15);
  EXPECT_EQ(k(1, 0), 0.0);
  EXPECT_NEAR(k(1, 1), std::sqrt(3.0) / 2, 1e-15);
}

TEST(Kahan, Structure) {
  const double c = std::cos(0.4), s = std::sin(0.4);
  const Matrix k = kahan(6, 0.4);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(k(i, i), std::pow(s, static_cast<double>(i)), 1e-15);
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(k(i, j), 0.0);
    for (std::size_t j = i + 1; j < 6; ++j) EXPECT_NEAR(k(i, j), -c * std::pow(s, static_cast<double>(i)), 1e-15);
  }
}

TEST(Kahan, RejectsInvalidArguments) {
  EXPECT_THROW(kahan(0, 0.3), Error);
  EXPECT_THROW(kahan(3, 0.0), Error);
  EXPECT_THROW(kahan(3, std::numbers::pi / 2), Error);
  EXPECT_THROW(kahan(3, -0.1), Error);
}

TEST(GradedRandom, UnitGradingGivesBaseMatrix) {
  const Matrix a = graded_random(5, 1.0, 1.0, 11);
  const Matrix b = graded_random(5, 0.5, 2.0, 11);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(b(i, j), std::pow(0.5, double(i)) * a(i, j) * std::pow(2.0, double(j)), 1e-14 * std::abs(a(i, j)));
}

TEST(GradedRandom, DeterministicPerSeed) {
  EXPECT_EQ(graded_random(4, 0.2, 2, 3), graded_random(4, 0.2, 2, 3));
  EXPECT_NE(graded_random(4, 0.2, 2, 3), graded_random(4, 0.2, 2, 4));
  EXPECT_THROW(graded_random(0, 1, 1, 1), Error);
  EXPECT_THROW(graded_random(3, 0, 1, 1), Error);
}

TEST(RandomC, EntriesInUnitInterval) {
  const Matrix c = random_c_matrix(50, 9);
  double sum = 0.0;
  for (double v : c.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 2500.0, 0.5, 0.05);
}

TEST(RngStream, NormalMoments) {
  RngStream rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(RngStream, TrialStreamsDiffer) {
  RngStream a = RngStream::for_trial(1, 0);
  RngStream b = RngStream::for_trial(1, 1);
  RngStream base(1);
  const std::uint64_t x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, base.next_u64());
  RngStream again = RngStream::for_trial(1, 0);
  EXPECT_EQ(x, again.next_u64());
}

TEST(SampleNormwise, HasRequestedNorm) {
  RngStream rng(2);
  for (double delta : {1e-8, 0.3, 5.0}) {
    const Matrix d = sample_normwise(4, 3, delta, rng);
    EXPECT_NEAR(frobenius_norm(d), delta, 1e-14 * delta);
  }
  EXPECT_EQ(sample_normwise(3, 3, 0.0, rng), Matrix(3, 3));
}

TEST(SampleEnvelope, RespectsBound) {
  const Matrix env = random_c_matrix(6, 3);
  RngStream rng(4);
  for (MagnitudeMode mode : {MagnitudeMode::Uniform, MagnitudeMode::Extreme}) {
    const Matrix d = sample_within_envelope(env, 1e-3, rng, mode);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_LE(std::abs(d(i, j)), 1e-3 * env(i, j) * (1 + 1e-15));
        if (mode == MagnitudeMode::Extreme) EXPECT_NEAR(std::abs(d(i, j)), 1e-3 * env(i, j), 1e-18);
      }
  }
}

TEST(PerturbationEnvelope, LuIsAbsFactorProduct) {
  const Matrix a = fperturb::testing::random_lu_friendly(5, 1);
  const LuFactors f = lu_factor(a);
  const Matrix e = perturbation_envelope({ComponentwiseLU{1e-6}, 0}, a);
  EXPECT_LT(fperturb::testing::max_abs_diff(e, fperturb::abs(f.L) * fperturb::abs(f.U)), 1e-13);
}

TEST(PerturbationEnvelope, QrIsCTimesAbsA) {
  const Matrix a = fperturb::testing::random_matrix(5, 3, 1);
  const Matrix c = random_c_matrix(5, 2);
  const Matrix e = perturbation_envelope({ComponentwiseQR{1e-6, c}, 0}, a);
  EXPECT_LT(fperturb::testing::max_abs_diff(e, c * fperturb::abs(a)), 1e-14);
  EXPECT_THROW(perturbation_envelope({Normwise{0.1}, 0}, a), Error);
}

TEST(SamplePerturbation, ComponentwiseWithinEnvelope) {
  const Matrix a = fperturb::testing::random_matrix(4, 4, 8);
  const Matrix c = random_c_matrix(4, 5);
  const PerturbationSpec spec{ComponentwiseQR{1e-4, c}, 17};
  const Matrix env = c * fperturb::abs(a);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Matrix d = sample_perturbation(spec, a, t);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) EXPECT_LE(std::abs(d(i, j)), 1e-4 * env(i, j) * (1 + 1e-15));
  }
  EXPECT_EQ(sample_perturbation(spec, a, 3), sample_perturbation(spec, a, 3));
  EXPECT_NE(sample_perturbation(spec, a, 3), sample_perturbation(spec, a, 4));
}

TEST(Validate, RejectsBadSpecs) {
  EXPECT_THROW(validate({Normwise{-1.0}, 0}), Error);
  EXPECT_THROW(validate({ComponentwiseLU{-1e-3}, 0}), Error);
  EXPECT_THROW(validate({ComponentwiseQR{1e-3, Matrix(2, 2, 2.0)}, 0}), Error);
  EXPECT_THROW(validate({ComponentwiseQR{1e-3, Matrix(2, 2, -0.5)}, 0}), Error);
  EXPECT_NO_THROW(validate({ComponentwiseQR{1e-3, Matrix(2, 2, 0.5)}, 0}));
}
