#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "steinrisk/shrinkage.hpp"

using namespace steinrisk;

namespace {

const ModelConfig kTen(10, 1.0);

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return v;
}

}  // namespace

TEST(JamesStein, ShrinkFactor) {
  EXPECT_DOUBLE_EQ(js_shrink_factor(16.0, kTen), 0.5);
  EXPECT_DOUBLE_EQ(js_shrink_factor(4.0, kTen), 2.0);
  EXPECT_DOUBLE_EQ(js_shrink_factor(8.0, kTen), 1.0);
  EXPECT_THROW(js_shrink_factor(0.0, kTen), SingularInputError);
  EXPECT_THROW(js_shrink_factor(1.0, ModelConfig(2, 1.0)), DomainError);
}

TEST(PositivePart, Coefficient) {
  EXPECT_EQ(positive_part_shrink_coefficient(4.0, kTen), 0.0);
  EXPECT_DOUBLE_EQ(positive_part_shrink_coefficient(16.0, kTen), 0.5);
  EXPECT_EQ(positive_part_shrink_coefficient(0.0, kTen), 0.0);
  EXPECT_NEAR(positive_part_shrink_coefficient(1e12, kTen), 1.0, 1e-11);
  EXPECT_THROW(positive_part_shrink_coefficient(1.0, ModelConfig(2, 1.0)), DomainError);
}

TEST(PositivePart, CoefficientInUnitInterval) {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> d(1.0, 3.0);
  std::uniform_int_distribution<int> kd(3, 200);
  for (int i = 0; i < 20000; ++i) {
    const ModelConfig cfg(kd(rng), d(rng));
    const double c = positive_part_shrink_coefficient(d(rng), cfg);
    ASSERT_GE(c, 0.0);
    ASSERT_LE(c, 1.0);
  }
}

TEST(Adm, FrozenValues) {
  // Frozen: mpmath 50-digit evaluation (tests/oracles).
  const AdmParams p(4.0, 1.0);
  EXPECT_NEAR(adm_shrink_factor(5.0, p), 0.55278640450004206072, 1e-12);
  EXPECT_NEAR(adm_shrink_factor(8.0, p), 0.41230473516044695709, 1e-12);
  EXPECT_NEAR(adm_bracket(5.0, p), 2.7639320225002103036, 1e-12);
  EXPECT_NEAR(adm_shrink_factor(1e-9, p), 0.799999999968, 1e-12);
  EXPECT_NEAR(adm_shrink_factor(1e-12, p), 0.799999999999968, 1e-14);
}

TEST(Adm, Limits) {
  const AdmParams p(4.0, 1.0);
  EXPECT_NEAR(1e12 * adm_shrink_factor(1e12, p), p.bracket_limit(), 1e-9);
  EXPECT_DOUBLE_EQ(p.bracket_limit(), 4.0);
  EXPECT_DOUBLE_EQ(p.shrink_at_origin(), 0.8);
}

TEST(Adm, Errors) {
  EXPECT_THROW(adm_shrink_factor(0.0, AdmParams(4.0)), DomainError);
  EXPECT_THROW(adm_shrink_factor(-1.0, AdmParams(4.0)), DomainError);
  EXPECT_THROW(AdmParams(0.0), DomainError);
  EXPECT_THROW(AdmParams(1.0, 0.0), DomainError);
  EXPECT_THROW(AdmParams(1.0, 2.5), DomainError);  // m - c + 1 <= 0
}

TEST(Adm, DefaultParams) {
  const auto p = AdmParams::default_for(kTen);
  EXPECT_DOUBLE_EQ(p.m, 4.0);
  EXPECT_DOUBLE_EQ(p.c, 1.0);
  EXPECT_THROW(AdmParams::default_for(ModelConfig(2, 1.0)), DomainError);
}

TEST(AdmProperties, MonotoneDecreasingAndBounded) {
  const auto Ts = log_grid(1e-6, 1e8, 4000);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> md(0.05, 60.0);
  std::uniform_real_distribution<double> cd(1.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double m = md(rng);
    const double c = std::min(cd(rng), m + 0.99);
    const AdmParams p(m, c);
    double prev = INFINITY;
    for (double T : Ts) {
      const double B = adm_shrink_factor(T, p);
      ASSERT_LT(B, prev) << "m=" << m << " c=" << c << " T=" << T;
      ASSERT_GT(B, 0.0);
      ASSERT_LT(B, p.shrink_at_origin());
      ASSERT_LE(p.shrink_at_origin(), 1.0);
      prev = B;
    }
  }
}

TEST(AdmProperties, GNondecreasing) {
  const auto Ts = log_grid(1e-6, 1e8, 4000);
  for (double m : {0.5, 0.8, 1.0, 4.0 / 3.0, 2.0, 4.0, 8.0, 20.0, 48.0}) {
    for (double c : {1.0, 1.2}) {
      if (m - c + 1.0 <= 0.0) continue;
      const auto est = ShrinkageEstimator::adm(AdmParams(m, c));
      double prev = 0.0;
      for (double T : Ts) {
        const double g = est.g_of_theorem(2.0 * T, kTen);
        ASSERT_GE(g, prev - 1e-12 * (1.0 + prev)) << "m=" << m << " T=" << T;
        prev = g;
      }
    }
  }
}

TEST(Estimator, GOfTheorem) {
  const auto js = ShrinkageEstimator::james_stein();
  for (double s : {0.1, 1.0, 16.0, 1e6}) EXPECT_DOUBLE_EQ(js.g_of_theorem(s, kTen), 8.0);
  const auto adm = ShrinkageEstimator::adm(AdmParams(4.0));
  EXPECT_NEAR(adm.g_of_theorem(10.0, kTen), 5.5278640450004206, 1e-12);
  EXPECT_NEAR(adm.g_of_theorem(2e8, kTen), 8.0, 1e-6);
  // Frozen: mpmath 2 * bracket at T = 1e8.
  EXPECT_NEAR(adm.g_of_theorem(2e8, kTen), 7.9999999199999976, 1e-12);
  EXPECT_THROW(adm.g_of_theorem(0.0, kTen), DomainError);
  EXPECT_DOUBLE_EQ(ShrinkageEstimator::mle().g_of_theorem(3.0, kTen), 0.0);
}

TEST(Estimator, EstimateRules) {
  std::vector<double> y(10, 0.0);
  y[0] = std::sqrt(10.0);
  const auto adm = estimate(ShrinkageEstimator::adm(AdmParams(4.0)), y, kTen);
  EXPECT_NEAR(adm[0], (1.0 - 0.55278640450004206) * y[0], 1e-12);
  EXPECT_NEAR(adm[0] / y[0], 0.4472136, 1e-6);
  for (int i = 1; i < 10; ++i) EXPECT_EQ(adm[i], 0.0);

  std::vector<double> any{1.5, -2.0, 0.25, 3.0, -1.0, 0.0, 7.0, -0.5, 2.0, 1.0};
  EXPECT_EQ(estimate(ShrinkageEstimator::mle(), any, kTen), any);

  std::vector<double> small(10, 0.0);
  small[3] = 2.0;  // |y|^2 = 4
  const auto pp = estimate(ShrinkageEstimator::positive_part(), small, kTen);
  for (double v : pp) EXPECT_EQ(v, 0.0);

  const std::vector<double> zero(10, 0.0);
  EXPECT_EQ(estimate(ShrinkageEstimator::adm(AdmParams(4.0)), zero, kTen), zero);
  EXPECT_EQ(estimate(ShrinkageEstimator::positive_part(), zero, kTen), zero);
  EXPECT_THROW(estimate(ShrinkageEstimator::james_stein(), zero, kTen), SingularInputError);
  EXPECT_THROW(estimate(ShrinkageEstimator::mle(), std::vector<double>(3), kTen), DomainError);
}

TEST(Estimator, CustomRule) {
  // B = min(1, a / |y|^2) with a = 5: a Baranchik-type rule supplied by the caller.
  const auto custom = ShrinkageEstimator::custom(
      "clamped", [](double s, const ModelConfig& cfg) { return std::min(1.0, 5.0 * cfg.V() / s); });
  EXPECT_EQ(custom.kind(), EstimatorKind::Custom);
  std::vector<double> y(10, 1.0);
  const auto d = custom.estimate(y, kTen);
  for (double v : d) EXPECT_DOUBLE_EQ(v, 0.5);
  EXPECT_DOUBLE_EQ(custom.g_of_theorem(10.0, kTen), 5.0);
  EXPECT_THROW(ShrinkageEstimator::custom("empty", nullptr), DomainError);
}

TEST(EstimatorProperties, EquivariantUnderSignedPermutations) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> nd(0.0, 2.0);
  const std::vector<ShrinkageEstimator> ests{ShrinkageEstimator::james_stein(), ShrinkageEstimator::positive_part(),
                                             ShrinkageEstimator::adm(AdmParams(4.0)), ShrinkageEstimator::mle()};
  std::vector<int> perm(10);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> y(10);
    for (auto& v : y) v = nd(rng);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> signs(10);
    for (auto& s : signs) s = (rng() & 1) ? -1.0 : 1.0;
    std::vector<double> qy(10);
    for (int i = 0; i < 10; ++i) qy[i] = signs[i] * y[perm[i]];
    for (const auto& e : ests) {
      const auto dy = e.estimate(y, kTen);
      const auto dqy = e.estimate(qy, kTen);
      for (int i = 0; i < 10; ++i) ASSERT_NEAR(dqy[i], signs[i] * dy[perm[i]], 1e-12 * (1 + std::abs(dy[perm[i]])));
    }
  }
}

TEST(EstimatorProperties, ScaleConsistency) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 1.5);
  std::lognormal_distribution<double> sd(0.0, 1.0);
  const std::vector<ShrinkageEstimator> ests{ShrinkageEstimator::james_stein(), ShrinkageEstimator::positive_part(),
                                             ShrinkageEstimator::adm(AdmParams(4.0)), ShrinkageEstimator::mle()};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> y(10);
    for (auto& v : y) v = nd(rng);
    const double s = sd(rng);
    std::vector<double> sy(10);
    for (int i = 0; i < 10; ++i) sy[i] = s * y[i];
    const ModelConfig scaled(10, s * s * kTen.V());
    for (const auto& e : ests) {
      const auto a = e.estimate(y, kTen);
      const auto b = e.estimate(sy, scaled);
      for (int i = 0; i < 10; ++i) ASSERT_NEAR(b[i], s * a[i], 1e-10 * (1 + std::abs(s * a[i])));
    }
  }
}
