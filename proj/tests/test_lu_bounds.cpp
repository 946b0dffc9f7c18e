#include <gtest/gtest.h>

#include <cmath>

#include "fperturb/dense.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/matgen.hpp"
#include "fperturb/scaling.hpp"
#include "support.hpp"

using namespace fperturb;
using fperturb::testing::random_lu_friendly;
using fperturb::testing::svd_norm;

namespace {

constexpr double kRel = 1e-10;

LuFactors identity_factors(std::size_t n) { return lu_factor(Matrix::identity(n)); }

}  // namespace

TEST(LuNormwise, IdentityZeroDelta) {
  const LuNormwiseReport r = lu_normwise_bounds(identity_factors(4), 0.0);
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(*r.rigorous_dl, 0.0);
  EXPECT_EQ(*r.rigorous_du, 0.0);
  EXPECT_EQ(*r.relaxed_dl, 0.0);
  EXPECT_EQ(r.first_order_dl, 0.0);
  EXPECT_EQ(*r.comparison.bound_du, 0.0);
}

TEST(LuNormwise, IdentityClosedForm) {
  const LuNormwiseReport r = lu_normwise_bounds(identity_factors(5), 3.0 / 16.0);
  EXPECT_NEAR(r.yl_norm, 1.0, 1e-12);
  EXPECT_NEAR(r.yu_norm, 1.0, 1e-12);
  EXPECT_NEAR(r.condition_value, 3.0 / 16.0, 1e-12);
  ASSERT_TRUE(r.applicable);
  EXPECT_NEAR(*r.rigorous_dl, 0.25, 1e-12);
  EXPECT_NEAR(*r.rigorous_du, 0.25, 1e-12);
}

TEST(LuNormwise, IdentityInapplicableAboveQuarter) {
  const LuNormwiseReport r = lu_normwise_bounds(identity_factors(5), 0.3);
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.rigorous_dl.has_value());
  EXPECT_FALSE(r.relaxed_du.has_value());
  // The first-order condition ||L^-1|| ||U^-1|| delta < 1 still holds.
  EXPECT_TRUE(r.first_order_applicable);
}

TEST(LuNormwise, NegativeDeltaRejected) {
  const LuNormwiseAnalysis an(identity_factors(3));
  EXPECT_THROW(an.evaluate(-1.0), Error);
  EXPECT_THROW(an.evaluate(std::nan("")), Error);
}

TEST(LuNormwise, ComparisonIdentity) {
  const ChangStehleLuBounds c =
      chang_stehle_lu(identity_factors(4), 0.1, ScalingMatrix::identity(4), ScalingMatrix::identity(4));
  ASSERT_TRUE(c.applicable);
  EXPECT_NEAR(*c.bound_dl, 0.2, 1e-14);
  EXPECT_NEAR(*c.bound_du, 0.2, 1e-14);
}

TEST(LuNormwise, NormsMatchDenseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LuFactors f = lu_factor(random_lu_friendly(5, seed));
    const LuNormwiseAnalysis an(f);
    const double yl = svd_norm(build_yl(f).materialize());
    const double yu = svd_norm(build_yu(f).materialize());
    EXPECT_NEAR(an.yl_norm(), yl, 1e-8 * yl);
    EXPECT_NEAR(an.yu_norm(), yu, 1e-8 * yu);
  }
}

TEST(LuNormwise, LowerAndUpperEstimates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix a = seed % 2 ? random_lu_friendly(6, seed) : graded_random(6, 0.5, 2.0, seed);
    const LuFactors f = lu_factor(a);
    const LuNormwiseAnalysis an(f);
    EXPECT_GE(an.yl_norm() * (1 + kRel), an.u_lead_inv_norm());
    EXPECT_GE(an.yu_norm() * (1 + kRel), an.l_inv_norm());
    EXPECT_LE(an.yl_norm(), an.kappa_l_scaled() * an.u_lead_inv_norm() * (1 + kRel));
    EXPECT_LE(an.yu_norm(), an.kappa_u_scaled() * an.l_inv_norm() * (1 + kRel));
  }
}

TEST(LuNormwise, OrderingsWithinReport) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LuFactors f = lu_factor(random_lu_friendly(5, seed));
    const LuNormwiseAnalysis an(f);
    const double delta = 0.2 / (an.yl_norm() * an.yu_norm());
    const LuNormwiseReport r = an.evaluate(delta);
    ASSERT_TRUE(r.applicable);
    EXPECT_LE(*r.rigorous_dl, *r.relaxed_dl);
    EXPECT_LE(*r.rigorous_du, *r.relaxed_du);
    EXPECT_NEAR(*r.relaxed_dl_explicit, *r.relaxed_dl, kRel * *r.relaxed_dl);
    EXPECT_NEAR(*r.relaxed_du_explicit, *r.relaxed_du, kRel * *r.relaxed_du);
    EXPECT_LE(r.first_order_dl, *r.rigorous_dl);
    if (r.comparison.applicable) {
      EXPECT_LE(*r.relaxed_dl, *r.comparison.bound_dl * (1 + kRel));
      EXPECT_LE(*r.relaxed_du, *r.comparison.bound_du * (1 + kRel));
    }
  }
}

TEST(LuNormwise, SingleElementMatrix) {
  const LuNormwiseReport r = lu_normwise_bounds(lu_factor(Matrix::from_rows({{2.0}})), 0.1);
  EXPECT_EQ(leading_block_inverse_norm(Matrix::from_rows({{2.0}})), 0.0);
  EXPECT_EQ(r.yl_norm, 0.0);
  EXPECT_NEAR(r.yu_norm, 1.0, 1e-15);
  EXPECT_EQ(*r.rigorous_dl, 0.0);
}

TEST(GaussianEliminationEpsilon, Formula) {
  const double nu = 10 * kUnitRoundoff;
  EXPECT_DOUBLE_EQ(gaussian_elimination_epsilon(10), nu / (1 - nu));
}

TEST(LuComponentwise, IdentityHasNoLowerChange) {
  const LuComponentwiseAnalysis an(identity_factors(4));
  const LuComponentwiseReport r = an.evaluate(0.1);
  EXPECT_EQ(r.a, 0.0);
  ASSERT_TRUE(r.applicable);
  EXPECT_EQ(*r.rigorous_dl, 0.0);
  EXPECT_EQ(r.first_order_dl_M, 0.0);
}

TEST(LuComponentwise, ZeroEpsilonGivesZeroBounds) {
  const LuComponentwiseAnalysis an(lu_factor(random_lu_friendly(4, 1)));
  const LuComponentwiseReport r = an.evaluate(0.0);
  ASSERT_TRUE(r.applicable);
  EXPECT_EQ(*r.rigorous_dl, 0.0);
  EXPECT_EQ(*r.rigorous_du, 0.0);
}

TEST(LuComponentwise, QuantitiesMatchDefinitions) {
  const LuFactors f = lu_factor(random_lu_friendly(4, 2));
  const LuComponentwiseAnalysis an(f);
  const LuComponentwiseReport r = an.evaluate(1e-6);
  const Matrix yl_abs = fperturb::abs(build_yl(f).materialize());
  const Matrix yu_abs = fperturb::abs(build_yu(f).materialize());
  const Vector e = vec(fperturb::abs(f.L) * fperturb::abs(f.U));
  const double a = norm2(yl_abs * std::span<const double>(e));
  const double b = norm2(yu_abs * std::span<const double>(e));
  EXPECT_NEAR(r.a, a, kRel * a);
  EXPECT_NEAR(r.b, b, kRel * b);
  EXPECT_NEAR(r.yl_abs_norm, svd_norm(yl_abs), 1e-8 * svd_norm(yl_abs));
  EXPECT_NEAR(r.c, b * r.yl_abs_norm - a * r.yu_abs_norm, 1e-8 * (b * r.yl_abs_norm + a * r.yu_abs_norm));
  EXPECT_DOUBLE_EQ(r.tau, r.c * 1e-6);
  EXPECT_NEAR(r.first_order_dl_F, a * 1e-6, kRel * a * 1e-6);
  ASSERT_TRUE(r.gamma_L.has_value());
  EXPECT_NEAR(*r.gamma_L, a / (1 - r.tau) / frobenius_norm(f.L), kRel * *r.gamma_L);
}

TEST(LuComponentwise, OrderingsAndEarlierFirstOrderBounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = seed % 2 ? random_lu_friendly(5, seed) : graded_random(5, 2.0, 0.5, seed);
    const LuComponentwiseAnalysis an(lu_factor(a));
    const LuComponentwiseReport r = an.evaluate(1e-12);
    ASSERT_TRUE(r.applicable);
    EXPECT_LE(*r.rigorous_dl, *r.relaxed_dl);
    EXPECT_LE(*r.rigorous_du, *r.relaxed_du);
    EXPECT_LE(r.first_order_dl_F, r.chang_first_order_dl_F * (1 + kRel));
    EXPECT_LE(r.first_order_du_F, r.chang_first_order_du_F * (1 + kRel));
    EXPECT_LE(r.first_order_dl_S, r.chang_first_order_dl_S * (1 + kRel));
    EXPECT_LE(r.first_order_du_S, r.chang_first_order_du_S * (1 + kRel));
    EXPECT_LE(r.first_order_dl_M, r.first_order_dl_F * (1 + kRel));
  }
}

TEST(LuComponentwise, InapplicableHidesRigorousBounds) {
  const LuComponentwiseAnalysis an(lu_factor(random_lu_friendly(4, 3)));
  const LuComponentwiseReport r = an.evaluate(10.0);
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.rigorous_dl.has_value());
  EXPECT_FALSE(r.gamma_L.has_value());
  EXPECT_FALSE(r.comparison_dl.has_value());
}

TEST(LuComponentwise, WorstCasePerturbationStaysInsideEnvelope) {
  const LuComponentwiseAnalysis an(lu_factor(random_lu_friendly(5, 4)));
  const double eps = 1e-7;
  for (FactorTarget t : {FactorTarget::L, FactorTarget::U}) {
    const Matrix da = an.worst_case_m_norm_perturbation(eps, t);
    Matrix limit = an.envelope();
    limit *= eps;
    EXPECT_TRUE(entrywise_leq(fperturb::abs(da), limit));
  }
}

TEST(LuComponentwise, WorstCaseForDiagonalMatrix) {
  // Each diagonal entry of U~ depends on one entry of dA only, so the row
  // attaining the max (U(2,2) = 3) selects a single diagonal entry; sign(0) = 0
  // leaves every other entry untouched.
  const LuComponentwiseAnalysis an(lu_factor(Matrix::from_rows({{2, 0}, {0, 3}})));
  const Matrix da = an.worst_case_m_norm_perturbation(0.01, FactorTarget::U);
  EXPECT_EQ(da(0, 1), 0.0);
  EXPECT_EQ(da(1, 0), 0.0);
  EXPECT_EQ(da(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(std::abs(da(1, 1)), 0.03);
}

TEST(LuComponentwise, ScaledGammaExceedsGammaOnGradedMatrix) {
  const Matrix a = graded_random(10, 0.2, 0.2, 1);
  const LuComponentwiseAnalysis an(lu_factor(a));
  const LuComponentwiseReport r = an.evaluate(gaussian_elimination_epsilon(10));
  ASSERT_TRUE(r.gamma_L.has_value());
  EXPECT_GE(r.gamma_L_D / *r.gamma_L, 10.0);
  EXPECT_GE(r.eta_DL, 1.0 - 1e-12);
  EXPECT_GE(r.eta_DU, 1.0 - 1e-12);
}

TEST(LuComponentwise, ExplicitScalingsAccepted) {
  const LuFactors f = lu_factor(random_lu_friendly(3, 5));
  const LuComponentwiseAnalysis an(f, ScalingMatrix::identity(3), ScalingMatrix::identity(3));
  const LuComponentwiseReport r = an.evaluate(1e-9);
  EXPECT_GT(r.gamma_L_D, 0.0);
}
