#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace evpos;
using namespace evpos::test;

namespace {

// vw^T/(w^T v) + rho R with v = w = (1,1,1)/sqrt(3) and R a rotation by th on the complement.
ComplexMatrix projection_plus_rotation(double rho, double th) {
  const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
  const double e1[3] = {1 / s2, -1 / s2, 0}, e2[3] = {1 / s6, 1 / s6, -2 / s6};
  ComplexMatrix t(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = 1.0 / 3.0 + rho * (std::cos(th) * (e1[i] * e1[j] + e2[i] * e2[j]) +
                                   std::sin(th) * (e2[i] * e1[j] - e1[i] * e2[j]));
  return t;
}

double min_real_entry(const EMat& m) { return m.real().minCoeff(); }

}  // namespace

TEST(IsPositiveMatrix, Examples) {
  EXPECT_TRUE(is_positive_matrix(ComplexMatrix::identity(3), 0.0));
  EXPECT_FALSE(is_positive_matrix(real_matrix({{1, -0.5}, {0, 1}}), 1e-12));
  EXPECT_TRUE(is_positive_matrix(real_matrix({{0, 1}, {1, 0}}), 0.0));
  EXPECT_FALSE(is_positive_matrix(ComplexMatrix{{Complex(1, 0.1)}}, 1e-12));
}

TEST(Powers, SwapIsPositiveFromStartWithoutCertificate) {
  const auto c = eventual_positivity_of_powers(real_matrix({{0, 1}, {1, 0}}));
  EXPECT_EQ(c.verdict, PositivityVerdict::positive_from_start);
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(*c.witness, 0.0);
  EXPECT_FALSE(c.spectral_certificate);
}

TEST(Powers, IdentityIsPositiveFromStart) {
  const auto c = eventual_positivity_of_powers(ComplexMatrix::identity(3));
  EXPECT_EQ(c.verdict, PositivityVerdict::positive_from_start);
  EXPECT_EQ(c.witness.value_or(-1), 0.0);
}

TEST(Powers, ProjectionPlusRotationAtTwoThirdsPiIsAlreadyPositive) {
  // With angle 2pi/3 the smallest entry of T is (1 - rho)/3, so T >= 0 for every rho < 1.
  const auto t = projection_plus_rotation(0.5, 2.0 * std::numbers::pi / 3.0);
  EXPECT_NEAR(min_real_entry(to_eigen(t)), 0.5 / 3.0, 1e-14);
  const auto c = eventual_positivity_of_powers(t);
  EXPECT_EQ(c.verdict, PositivityVerdict::positive_from_start);
  EXPECT_TRUE(c.spectral_certificate);
}

TEST(Powers, ProjectionPlusRotationCertifiedAgainstEigenPowers) {
  const auto t = projection_plus_rotation(0.9, std::numbers::pi / 2.0);
  const auto c = eventual_positivity_of_powers(t);
  EXPECT_EQ(c.verdict, PositivityVerdict::certified_strictly_eventually_positive);
  ASSERT_TRUE(c.witness);
  const int n0 = static_cast<int>(*c.witness);
  EXPECT_GT(n0, 0);
  const EMat te = to_eigen(t);
  EMat p = EMat::Identity(3, 3);
  for (int n = 0; n <= 200; ++n) {
    if (n >= n0) {
      EXPECT_GE(min_real_entry(p), -1e-12) << "n = " << n;
    }
    if (n == n0 - 1) {
      EXPECT_LT(min_real_entry(p), 0.0);
    }
    p = p * te;
  }
  ASSERT_TRUE(c.spectral_certificate);
  EXPECT_NEAR(std::abs(c.spectral_certificate->dominant_eigenvalue - 1.0), 0.0, 1e-12);
}

TEST(Powers, RotationNotDetected) {
  const auto c = eventual_positivity_of_powers(real_matrix({{0, -1}, {1, 0}}));
  EXPECT_EQ(c.verdict, PositivityVerdict::not_detected);
  EXPECT_FALSE(c.witness);
}

TEST(Semigroup, MetzlerPositiveFromStart) {
  const auto c = eventual_positivity_of_semigroup(real_matrix({{-1, 1}, {1, -1}}));
  EXPECT_EQ(c.verdict, PositivityVerdict::positive_from_start);
  EXPECT_EQ(c.witness.value_or(-1), 0.0);
}

TEST(Semigroup, RotationNotDetected) {
  const auto c = eventual_positivity_of_semigroup(real_matrix({{0, -1}, {1, 0}}));
  EXPECT_EQ(c.verdict, PositivityVerdict::not_detected);
  EXPECT_FALSE(c.witness);
  EXPECT_FALSE(c.spectral_certificate);
}

TEST(Semigroup, GeneratedInstancesCertifiedAgainstEigenExp) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = generate(Family::evpos_semigroup, 3 + seed % 5, seed);
    const auto c = eventual_positivity_of_semigroup(b.matrix);
    EXPECT_EQ(c.verdict, PositivityVerdict::certified_strictly_eventually_positive) << "seed " << seed;
    ASSERT_TRUE(c.witness);
    const double t0 = *c.witness;
    EXPECT_GT(t0, 0.0);
    const EMat a = to_eigen(b.matrix);
    const double s = b.ground_truth.spectral_bound.value();
    const EMat shifted_a = a - s * EMat::Identity(a.rows(), a.cols());
    for (double t : {t0, 1.5 * t0 + 0.1, 10.0, 40.0}) {
      const EMat et = (shifted_a * t).exp();
      EXPECT_GE(min_real_entry(et), -1e-9 * et.cwiseAbs().maxCoeff()) << "seed " << seed << " t " << t;
    }
    // Some off-diagonal entry of A is negative, so e^{tA} has a negative entry for small t.
    EXPECT_LT(min_real_entry((a * 1e-3).exp()), 0.0) << "seed " << seed;
  }
}

TEST(PerronFrobenius, Examples) {
  const auto c = perron_frobenius_certificate(real_matrix({{2, 1}, {1, 2}}), PositivityKind::power);
  ASSERT_TRUE(c);
  EXPECT_NEAR(std::abs(c->dominant_eigenvalue - 3.0), 0.0, 1e-12);
  ASSERT_EQ(c->right_vector.size(), 2u);
  for (const auto& x : c->right_vector) EXPECT_NEAR(std::abs(x - 1.0 / std::sqrt(2.0)), 0.0, 1e-12);
  EXPECT_FALSE(perron_frobenius_certificate(real_matrix({{0, 1}, {1, 0}}), PositivityKind::power));
  EXPECT_FALSE(perron_frobenius_certificate(real_matrix({{0, -1}, {1, 0}}), PositivityKind::semigroup));
}

TEST(PerronFrobenius, CertificateImpliesRealSimpleDominantPositive) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = random_matrix(5, seed, 2.0, false);
    for (auto mode : {PositivityKind::power, PositivityKind::semigroup}) {
      const auto c = perron_frobenius_certificate(a, mode);
      if (!c) continue;
      EXPECT_NEAR(c->dominant_eigenvalue.imag(), 0.0, 1e-8);
      EXPECT_GT(c->right_min, 0.0);
      EXPECT_GT(c->left_min, 0.0);
      EXPECT_GT(c->gap, 0.0);
    }
  }
}

TEST(Witness, PresentIffDetected) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = random_matrix(4, seed, 1.0, false);
    const auto c = eventual_positivity_of_semigroup(a, 20.0, 128);
    EXPECT_EQ(c.witness.has_value(), c.verdict != PositivityVerdict::not_detected);
    const auto p = eventual_positivity_of_powers(a, 100);
    EXPECT_EQ(p.witness.has_value(), p.verdict != PositivityVerdict::not_detected);
  }
}

TEST(Positivity, RejectsBadArguments) {
  EXPECT_THROW(eventual_positivity_of_semigroup(ComplexMatrix(2, 3)), DimensionError);
  EXPECT_THROW(eventual_positivity_of_semigroup(ComplexMatrix::identity(2), -1.0), ParameterError);
  EXPECT_THROW(eventual_positivity_of_powers(ComplexMatrix::identity(2), 0), ParameterError);
}
