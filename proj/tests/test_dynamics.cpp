#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace evpos;
using namespace evpos::test;

namespace {

const ComplexMatrix kRotation = real_matrix({{0, -1}, {1, 0}});
const ComplexMatrix kNilpotent = real_matrix({{0, 1}, {0, 0}});
const ComplexMatrix kDiag = ComplexMatrix::diagonal({0.0, -1.0});
const ComplexMatrix kMetzler = real_matrix({{-1, 1}, {1, -1}});

// Oracle Cesaro mean by composite Gauss-Legendre quadrature of Eigen's exp.
EMat oracle_cesaro(const EMat& a, double t, int panels = 400) {
  const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  EMat sum = EMat::Zero(a.rows(), a.cols());
  const double h = t / panels;
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < 3; ++q) sum += w[q] * (h / 2.0) * (a * (h * (k + 0.5) + h / 2.0 * x[q])).exp();
  return sum / t;
}

}  // namespace

TEST(Semigroup, Examples) {
  EXPECT_EQ(semigroup_at(kRotation, 0.0), ComplexMatrix::identity(2));
  for (double t : {0.5, 3.0, 40.0})
    EXPECT_LT(max_abs(semigroup_at(kNilpotent, t) - real_matrix({{1, t}, {0, 1}})), 1e-12 * (1 + t));
  EXPECT_LT(max_abs(semigroup_at(kRotation, std::numbers::pi / 2) - kRotation), 1e-15);
  EXPECT_THROW(semigroup_at(kRotation, -1.0), ParameterError);
}

TEST(RescaledSemigroup, Examples) {
  for (double t : {0.5, 4.0}) {
    EXPECT_LT(max_abs(rescaled_semigroup_at(kDiag, t) - ComplexMatrix::diagonal({1.0, std::exp(-t)})), 1e-14);
    EXPECT_LT(max_abs(rescaled_semigroup_at(ComplexMatrix::diagonal({3.0, 2.0}), t) -
                      ComplexMatrix::diagonal({1.0, std::exp(-t)})),
              1e-14);
    EXPECT_LT(max_abs(rescaled_semigroup_at(kNilpotent, t) - real_matrix({{1, t}, {0, 1}})), 1e-13);
  }
}

TEST(Cesaro, Examples) {
  for (double t : {0.3, 7.0}) EXPECT_LT(max_abs(cesaro_mean(ComplexMatrix::zero(3), t) - ComplexMatrix::identity(3)), 1e-14);
  EXPECT_LT(max_abs(cesaro_mean(kRotation, 2 * std::numbers::pi)), 1e-14);
}

TEST(Cesaro, IdentityAndQuadratureOracle) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto a = random_matrix(6, seed, 2.0);
    for (double t : {0.5, 3.0}) {
      const auto c = cesaro_mean(a, t);
      const auto lhs = a * c * Complex(t);
      const auto rhs = expm(a * Complex(t)) - ComplexMatrix::identity(6);
      EXPECT_LT(frobenius_norm(lhs - rhs) / (1 + frobenius_norm(rhs)), 1e-9);
      const EMat ref = oracle_cesaro(to_eigen(a), t);
      EXPECT_LT(oracle_diff(c, ref) / oracle_norm(ref), 1e-9) << "seed " << seed;
      EXPECT_LT(max_abs(cesaro_mean(a, t, true) - c), 1e-12 * (1 + max_abs(c)));
    }
  }
}

TEST(Bounded, Examples) {
  EXPECT_TRUE(is_bounded(kDiag).bounded);
  EXPECT_TRUE(is_bounded(kRotation).bounded);
  const auto n = is_bounded(kNilpotent);
  EXPECT_FALSE(n.bounded);
  EXPECT_FALSE(n.sampled_bounded);
  EXPECT_GT(n.bound_estimate, 40.0);
  EXPECT_FALSE(is_bounded(ComplexMatrix::diagonal({0.01, -1.0})).bounded);
}

TEST(MeanErgodic, Examples) {
  auto v = is_mean_ergodic(kDiag);
  ASSERT_TRUE(v.converges);
  EXPECT_LT(max_abs(*v.limit - ComplexMatrix::diagonal({1.0, 0.0})), 1e-7);
  v = is_mean_ergodic(kRotation);
  ASSERT_TRUE(v.converges);
  EXPECT_LT(max_abs(*v.limit), 1e-7);
  EXPECT_FALSE(is_mean_ergodic(kNilpotent).converges);
}

TEST(StrongConvergence, Examples) {
  auto v = strong_convergence_verdict(kDiag);
  ASSERT_TRUE(v.converges);
  EXPECT_LT(max_abs(*v.limit - ComplexMatrix::diagonal({1.0, 0.0})), 1e-7);
  EXPECT_LT(v.tail_defect, kDefaultConvergenceTol);
  v = strong_convergence_verdict(kRotation);
  EXPECT_FALSE(v.converges);
  EXPECT_GE(v.tail_defect, kDefaultConvergenceTol);
  v = strong_convergence_verdict(ComplexMatrix::diagonal({-1.0, -2.0}));
  ASSERT_TRUE(v.converges);
  EXPECT_LT(max_abs(*v.limit), 1e-12);
  EXPECT_FALSE(strong_convergence_verdict(kNilpotent).converges);
}

TEST(StrongConvergence, MetzlerLimitMatchesEigenExpAtLargeTime) {
  const auto v = strong_convergence_verdict(kMetzler);
  ASSERT_TRUE(v.converges);
  const EMat ref = (to_eigen(kMetzler) * 60.0).exp();
  EXPECT_LT(oracle_diff(*v.limit, ref), 1e-12);
  EXPECT_LT(max_abs(*v.limit - real_matrix({{0.5, 0.5}, {0.5, 0.5}})), 1e-12);
}

TEST(UniformConvergence, AgreesWithStrongOnMatrices) {
  for (const auto& a : {kDiag, kRotation, kNilpotent, kMetzler}) {
    EXPECT_EQ(uniform_convergence_verdict(a).converges, strong_convergence_verdict(a).converges);
  }
}

TEST(Balancing, Examples) {
  auto v = uniform_balancing_verdict(kDiag);
  ASSERT_TRUE(v.converges);
  EXPECT_LT(max_abs(*v.limit - ComplexMatrix::diagonal({1.0, 0.0})), 1e-7);
  EXPECT_EQ(v.limit_rank.value_or(0), 1u);
  EXPECT_FALSE(uniform_balancing_verdict(kNilpotent).converges);
}

TEST(Balancing, GeneratedInstancesConvergeToGroundTruthProjection) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = generate(Family::evpos_semigroup, 3 + seed % 6, seed);
    const auto v = uniform_balancing_verdict(b.matrix);
    ASSERT_TRUE(v.converges) << "seed " << seed;
    EXPECT_LT(max_abs(*v.limit - *b.ground_truth.projection), 1e-7) << "seed " << seed;
    EXPECT_EQ(v.limit_rank.value_or(0), b.ground_truth.projection_rank.value_or(99));
    EXPECT_LT(max_abs(*v.limit * *v.limit - *v.limit), 1e-7);
    // Oracle: Eigen's exp of the shifted generator at the horizon.
    const double s = *b.ground_truth.spectral_bound;
    const EMat shifted_a = to_eigen(b.matrix) - s * EMat::Identity(b.dim, b.dim);
    EXPECT_LT(oracle_diff(*v.limit, (shifted_a * 50.0).exp()), 1e-7) << "seed " << seed;
  }
}

TEST(NormContinuity, AlwaysHolds) {
  EXPECT_TRUE(norm_continuity_at_infinity(ComplexMatrix::zero(2)).holds);
  EXPECT_TRUE(norm_continuity_at_infinity(kNilpotent).holds);
  EXPECT_TRUE(norm_continuity_at_infinity(random_matrix(8, 3)).holds);
}

TEST(DecayFit, MatchesGroundTruthGap) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = generate(Family::evpos_semigroup, 3 + seed % 8, seed);
    const auto f = decay_rate_fit(b.matrix);
    EXPECT_NEAR(f.expected_slope, -*b.ground_truth.gap, 1e-7);
    EXPECT_LT(std::abs(f.slope / f.expected_slope - 1.0), 0.1) << "seed " << seed << " slope " << f.slope;
  }
}
