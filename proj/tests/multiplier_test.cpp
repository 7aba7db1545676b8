#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rieszlab/multiplier.hpp"
#include "rieszlab/projection.hpp"

using namespace rieszlab;

namespace {

const double sec_quarter = 1.0 / std::cos(std::numbers::pi / 4);

const FourierTable& tan_half_table() {
  static const FourierTable ft = fourier_coeffs(WeightSpec::tan_alpha(0.5), 512);
  return ft;
}

const MultiplierSection& tan_half_section_256() {
  static const MultiplierSection sec(tan_half_table(), 256);
  return sec;
}

}  // namespace

TEST(MultiplierSequence, GaussPrefixByHand) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 3);
  EXPECT_NEAR(s.nu(0), 1.0, 1e-15);
  EXPECT_NEAR(s.nu(1), 0.367879, 1e-6);
  EXPECT_NEAR(s.nu(2), 0.018316, 1e-6);
  EXPECT_NEAR(s.lambda(0), 0.367879, 1e-6);
  EXPECT_NEAR(s.lambda(1), 0.692201, 1e-6);
  EXPECT_NEAR(s.lambda(2), 0.981851, 1e-6);
  EXPECT_NEAR(s.kappa(0), 1.648721, 1e-6);
  EXPECT_NEAR(s.kappa(1) * s.kappa(1), s.nu(1) / s.nu(2), 1e-12);
}

TEST(MultiplierSequence, LambdasIncreaseAndStayBelowOne) {
  const MultiplierSequence s = MultiplierSequence::gauss(0.5, 40);
  for (int k = 1; k < s.size(); ++k) {
    EXPECT_LT(s.log_nu(k), s.log_nu(k - 1));
    EXPECT_LT(s.log_one_minus_lambda(k), s.log_one_minus_lambda(k - 1));
  }
}

TEST(MultiplierSequence, FlatFamilyIsNotFast) {
  const double flat[] = {0.5, 0.6, 0.7};
  EXPECT_THROW(MultiplierSequence::custom(flat), NotFast);
  const double fast[] = {0.5, 0.9, 0.999};
  EXPECT_NO_THROW(MultiplierSequence::custom(fast));
  const double bad[] = {0.5, 0.4, 0.9};
  EXPECT_THROW(MultiplierSequence::custom(bad), DomainError);
  const double one[] = {0.5, 1.0};
  EXPECT_THROW(MultiplierSequence::custom(one), DomainError);
  EXPECT_THROW(MultiplierSequence::gauss(0.0, 8), DomainError);
  EXPECT_THROW(MultiplierSequence::gauss(1.0, 1), DomainError);
}

TEST(MultiplierSequence, CustomMatchesDefinitions) {
  const double lam[] = {0.0, 0.5, 0.99};
  const MultiplierSequence s = MultiplierSequence::custom(lam);
  EXPECT_EQ(s.lambda_pow(0, 0.0), 1.0);
  EXPECT_EQ(s.lambda_pow(0, 3.0), 0.0);
  EXPECT_NEAR(s.lambda(1), 0.5, 1e-15);
  EXPECT_NEAR(s.lambda_pow(2, 7.0), std::pow(0.99, 7), 1e-14);
}

TEST(PowerSchedule, GaussFirstValues) {
  const PowerSchedule N(MultiplierSequence::gauss(1.0, 10));
  ASSERT_GE(N.size(), 5);
  EXPECT_EQ(N[0], 1u);
  EXPECT_EQ(N[1], 12u);
  EXPECT_EQ(N[2], 665u);
  EXPECT_EQ(N[3], 268337u);    // floor(e^{12.5}), e^{12.5} = 268337.28...
  EXPECT_EQ(N[4], 799902177u);  // floor(e^{20.5}), e^{20.5} = 799902177.49...
}

TEST(PowerSchedule, IsGreatestIntegerBelowBoundary) {
  const MultiplierSequence s = MultiplierSequence::gauss(0.37, 30);
  const PowerSchedule N(s);
  for (int n = 0; n < N.size(); ++n) {
    const long double root = std::sqrt(static_cast<long double>(s.nu(n)) * s.nu(n + 1));
    EXPECT_LE(static_cast<long double>(N[n]) * root, 1.0L + 1e-15L);
    EXPECT_GT(static_cast<long double>(N[n] + 1) * root, 1.0L - 1e-15L);
    if (n > 0) {
      EXPECT_GE(N[n], N[n - 1]);
    }
  }
}

TEST(PowerSchedule, StopsBeforeOverflow) {
  const PowerSchedule N(MultiplierSequence::gauss(1.0, 64));
  EXPECT_EQ(N.size(), 7);  // (2n^2 + 2n + 1)/2 = 56.5 at n = 7 exceeds log(2^64)
}

TEST(PowerNorm, ConstantWeightIsLargestEigenvalue) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 32);
  const FourierTable ft = fourier_coeffs(WeightSpec::constant(), 32);
  for (std::uint64_t n : {0u, 1u, 12u, 665u}) {
    const double expected = std::pow(s.lambda(31), static_cast<double>(n));
    EXPECT_NEAR(power_norm(s, ft, n, 32), expected, 1e-10);
  }
}

TEST(PowerNorm, ZerothPowerIsIdentity) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 64);
  EXPECT_EQ(power_norm(s, tan_half_table(), 0, 64), 1.0);
}

TEST(PowerNorm, TanSweepStaysBelowSecant) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 128);
  const PowerSchedule N(s);
  const MultiplierSection sec(tan_half_table(), 128);
  for (std::uint64_t p : power_sweep_grid(N, 5)) EXPECT_LE(power_norm(s, sec, p), sec_quarter + 1e-6) << "n " << p;
}

TEST(PowerNorm, Submultiplicative) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 64);
  const MultiplierSection sec(tan_half_table(), 64);
  for (std::uint64_t a : {1u, 3u, 12u})
    for (std::uint64_t b : {2u, 5u, 665u})
      EXPECT_LE(power_norm(s, sec, a + b), power_norm(s, sec, a) * power_norm(s, sec, b) + 1e-8);
}

TEST(PowerNorm, ScaleInvariant) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 48);
  const FourierTable a = fourier_coeffs(WeightSpec::tan_alpha(0.5), 48);
  const FourierTable b = fourier_coeffs(WeightSpec::tan_alpha(0.5).scaled(7.0), 48);
  for (std::uint64_t n : {1u, 12u, 665u}) EXPECT_NEAR(power_norm(s, a, n, 48), power_norm(s, b, n, 48), 1e-10);
}

TEST(PowerSweepGrid, CoversScheduleNeighbours) {
  const PowerSchedule N(MultiplierSequence::gauss(1.0, 16));
  const auto g = power_sweep_grid(N, 4);
  EXPECT_EQ(g.front(), 0u);
  EXPECT_EQ(g.back(), N[4]);
  for (int k = 0; k < 4; ++k) {
    EXPECT_TRUE(std::binary_search(g.begin(), g.end(), N[k]));
    EXPECT_TRUE(std::binary_search(g.begin(), g.end(), N[k] + 1));
  }
  for (std::uint64_t n = 0; n <= 64; ++n) EXPECT_TRUE(std::binary_search(g.begin(), g.end(), n));
}

TEST(TailGap, ConstantWeightByHand) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 64);
  const TailGap t = tail_gap(s, WeightSpec::constant(), fourier_coeffs(WeightSpec::constant(), 64), 1, 64);
  EXPECT_EQ(t.N, 12u);
  const double l1 = std::exp(-std::exp(-1.0)), l2 = std::exp(-std::exp(-4.0));
  const double expected = std::max(std::pow(l1, 12), 1.0 - std::pow(l2, 12));
  EXPECT_NEAR(expected, 0.1975, 5e-4);
  EXPECT_NEAR(t.gap, expected, 1e-10);
  EXPECT_TRUE(t.certified);
  EXPECT_EQ(t.b, 1.0);
  EXPECT_LE(t.gap, t.analytic_bound + 1e-6);
}

TEST(TailGap, TanDecaysBelowAnalyticBound) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 256);
  const PowerSchedule N(s);
  double previous = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const TailGap t = tail_gap(s, N, tan_half_section_256(), n, sec_quarter, true);
    EXPECT_LE(t.gap, t.analytic_bound + 1e-6) << "n " << n;
    if (n > 1) {
      EXPECT_LT(t.gap, previous) << "n " << n;
    }
    previous = t.gap;
  }
}

TEST(TailGap, TruncationDominatedAtSectionEdge) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 6);
  const FourierTable ft = fourier_coeffs(WeightSpec::constant(), 8);
  EXPECT_TRUE(tail_gap(s, WeightSpec::constant(), ft, 4, 6).truncation_dominated);
  EXPECT_FALSE(tail_gap(s, WeightSpec::constant(), ft, 3, 6).truncation_dominated);
  EXPECT_THROW(tail_gap(s, WeightSpec::constant(), ft, 5, 6), DomainError);
}

TEST(TailGap, UncertifiedWeightsUseSectionBasisConstant) {
  const WeightSpec step = WeightSpec::piecewise_step({1.0, 2.0}, {0.0});
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 32);
  const FourierTable ft = fourier_coeffs(step, 32);
  const TailGap t = tail_gap(s, step, ft, 2, 32);
  EXPECT_FALSE(t.certified);
  EXPECT_NEAR(t.b, basis_constant_section(ft, 32), 1e-12);
}

TEST(CertifiedRieszNorm, ClosedForms) {
  EXPECT_EQ(*certified_riesz_norm(WeightSpec::constant()), 1.0);
  EXPECT_NEAR(*certified_riesz_norm(WeightSpec::tan_alpha(0.8)), 3.2360680, 1e-7);
  EXPECT_NEAR(*certified_riesz_norm(WeightSpec::power_of(WeightSpec::tan_alpha(0.25), 2.0)), sec_quarter, 1e-12);
  EXPECT_FALSE(certified_riesz_norm(WeightSpec::power_of(WeightSpec::tan_alpha(0.5), 2.5)));
  EXPECT_FALSE(certified_riesz_norm(WeightSpec::abs_theta_alpha(0.5)));
}

TEST(BasisConstant, ConstantWeight) {
  EXPECT_NEAR(basis_constant_section(fourier_coeffs(WeightSpec::constant(), 32), 32), 1.0, 1e-10);
}

TEST(BasisConstant, TanHalfTracksSectionNorm) {
  const double bc = basis_constant_section(tan_half_section_256());
  EXPECT_GT(bc, 1.0);
  EXPECT_LE(bc, sec_quarter + 1e-6);
  EXPECT_NEAR(bc, riesz_norm_section(tan_half_table(), 128).sec_phi, 0.05);
}

TEST(BasisConstant, StepWeight) {
  const FourierTable ft = fourier_coeffs(WeightSpec::piecewise_step({1.0, 2.0}, {0.0}), 256);
  const double bc = basis_constant_section(ft, 128);
  EXPECT_GE(bc, 1.0);
  EXPECT_LE(bc, riesz_norm_section(ft, 128).sec_phi + 0.02);
}

TEST(BasisConstant, BoundsEveryPower) {
  const MultiplierSequence s = MultiplierSequence::gauss(1.0, 64);
  const PowerSchedule N(s);
  const MultiplierSection sec(tan_half_table(), 64);
  const double bc = basis_constant_section(sec);
  for (std::uint64_t p : power_sweep_grid(N, 4)) EXPECT_LE(power_norm(s, sec, p), bc + 1e-6) << "n " << p;
}

TEST(SignMultiplier, ConstantWeightIsIsometric) {
  const MultiplierSection sec(fourier_coeffs(WeightSpec::constant(), 64), 64);
  for (const auto& e : sign_patterns(64, 8, 99)) EXPECT_NEAR(sign_multiplier_norm(sec, e), 1.0, 1e-10);
}

TEST(SignMultiplier, AllOnesIsIdentity) {
  const MultiplierSection sec(tan_half_table(), 64);
  const std::vector<int> ones(64, 1);
  EXPECT_NEAR(sign_multiplier_norm(sec, ones), 1.0, 1e-12);
}

TEST(SignMultiplier, GrowsWithSectionOnTan) {
  const MultiplierSection small(tan_half_table(), 64);
  const SignSweep a = max_sign_multiplier_norm(small, 64, 1);
  const SignSweep b = max_sign_multiplier_norm(tan_half_section_256(), 64, 1);
  EXPECT_GT(a.max_norm, 1.0);
  EXPECT_GT(b.max_norm, a.max_norm);
  EXPECT_EQ(b.seed, 1u);
}

TEST(SignPatterns, DeterministicAndValid) {
  const auto a = sign_patterns(100, 5, 7);
  EXPECT_EQ(a, sign_patterns(100, 5, 7));
  EXPECT_NE(a, sign_patterns(100, 5, 8));
  int plus = 0;
  for (const auto& p : a)
    for (int e : p) {
      EXPECT_TRUE(e == 1 || e == -1);
      plus += e == 1;
    }
  EXPECT_GT(plus, 150);
  EXPECT_LT(plus, 350);
}
