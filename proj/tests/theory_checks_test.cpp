#include "wavedens/theory_checks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wavedens/experiments.hpp"

namespace wavedens {
namespace {

// Prior mass of the eps^2 = 0.01 KL ball around the uniform density under the
// default prior on Haar levels <= 2, from one million draws (se 4.8e-4).
constexpr double kGoldenKlMass = 0.650165;
constexpr double kGoldenKlMassSe = 0.00047692;

const WaveletBasis& Db2() {
  static const WaveletBasis basis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 13});
  return basis;
}

TEST(MinimaxRate, DirectEvaluation) {
  EXPECT_NEAR(MinimaxRate(1000, 1.0), 0.190449, 1e-6);
  const double parametric = std::sqrt(std::log(1000.0) / 1000.0);
  EXPECT_NEAR(MinimaxRate(1000, 100.0) / parametric, 1.0125, 1e-4);
  EXPECT_NEAR(MinimaxRate(1000, 1e6) / parametric, 1.0, 1e-5);
  EXPECT_THROW(MinimaxRate(1, 1.0), std::invalid_argument);
  EXPECT_THROW(MinimaxRate(100, 0.0), std::invalid_argument);
}

TEST(ThresholdProfile, HighRegimeValues) {
  const auto p = ThresholdProfile::Make(1000, 1.0, 1.0, 4, 0.5, 10);
  EXPECT_EQ(p.regime, Regime::kHigh);
  EXPECT_NEAR(p.at(0), 0.08311, 1e-5);
  EXPECT_NEAR(p.at(10), 3.0517578125e-5, 1e-15);
  EXPECT_EQ(JStar(1000, 1.0, 1.0), 2);
  EXPECT_THROW(p.at(11), std::out_of_range);
}

TEST(ThresholdProfile, LowRegimeDefinition) {
  const double n = 5000;
  const auto p = ThresholdProfile::Make(n, 0.5, 1.0, 4, 0.5, 13);
  EXPECT_EQ(p.regime, Regime::kLow);
  const double eps = std::pow(std::log(n) / n, 0.25);
  for (int j = 0; j <= 13; ++j) {
    EXPECT_DOUBLE_EQ(p.at(j), std::min(std::exp2(-0.5 * j) * eps, std::exp2(-1.0 * j)));
  }
}

TEST(ThresholdProfile, RegimeConsistencyWithJStar) {
  for (double beta : {0.75, 1.0, 2.0}) {
    for (double n : {500.0, 4096.0, 1e5}) {
      const int jn = DefaultTruncationLevel(static_cast<std::size_t>(n));
      const auto p = ThresholdProfile::Make(n, beta, 1.5, 4, 0.5, jn);
      const int js = JStar(n, beta, 1.5);
      const double flat = std::sqrt(std::log(n) / n);
      for (int j = 0; j <= jn; ++j) {
        const double expected = j <= js ? flat : 1.5 * std::exp2(-j * (beta + 0.5));
        EXPECT_DOUBLE_EQ(p.at(j), expected) << "beta " << beta << " n " << n << " j " << j;
        EXPECT_GT(p.at(j), 0.0);
        if (j > js && j > 0) EXPECT_LE(p.at(j), p.at(j - 1));
      }
    }
  }
}

TEST(ThresholdProfile, SupClauseBoundedByC0) {
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto p = ThresholdProfile::Make(4096, beta, 2.0, 4, 0.5, 12);
    for (int j = 0; j <= 12; ++j) EXPECT_LE(p.at(j) * std::exp2(j * (beta + 0.5)), 2.0 * (1 + 1e-12));
  }
}

class Partition : public ::testing::Test {
 protected:
  ThresholdProfile p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  CoeffVector theta0;
  void SetUp() override { theta0.Set(WaveletIndex::Wavelet(5, 3), 0.01); }
};

TEST_F(Partition, TruthIsEmptyKey) {
  EXPECT_TRUE(ClassifyPartition(theta0, theta0, {}, p, 2.0).empty());
}

TEST_F(Partition, SingleViolationAtTwiceMDeltaIsSliceThree) {
  CoeffVector theta = theta0;
  const WaveletIndex idx = WaveletIndex::Wavelet(6, 10);
  theta.Set(idx, 2.0 * 2.0 * p.at(6));
  const PartitionKey key = ClassifyPartition(theta, theta0, {}, p, 2.0);
  ASSERT_EQ(key.indices.size(), 1u);
  EXPECT_EQ(key.indices[0], idx);
  EXPECT_EQ(key.slice, 3);
}

TEST_F(Partition, LevelsUpToJ0NeverEnter) {
  CoeffVector theta = theta0;
  for (int j = 0; j <= 4; ++j) theta.Set(WaveletIndex::Wavelet(j, 0), 5.0);
  EXPECT_TRUE(ClassifyPartition(theta, theta0, {}, p, 2.0).empty());
}

TEST_F(Partition, EmptyKeyIffAllWithinThreshold) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d = 0; d < 500; ++d) {
    CoeffVector theta;
    bool violates = false;
    for (int j = 3; j <= 8; ++j) {
      const WaveletIndex idx = WaveletIndex::Wavelet(j, d % (1 << j));
      const double v = 2.5 * 2.0 * p.at(j) * u(rng);
      theta.Set(idx, theta0.Get(idx) + v);
      if (j > 4 && std::fabs(v) > 2.0 * p.at(j)) violates = true;
    }
    const PartitionKey key = ClassifyPartition(theta, theta0, {}, p, 2.0);
    EXPECT_EQ(key.empty(), !violates);
    EXPECT_EQ(key.slice.has_value(), violates);
  }
}

TEST_F(Partition, SliceRadiusIsAdditive) {
  const std::vector<WaveletIndex> a{WaveletIndex::Wavelet(5, 0), WaveletIndex::Wavelet(7, 2)};
  const std::vector<WaveletIndex> b{WaveletIndex::Wavelet(6, 1)};
  std::vector<WaveletIndex> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const double ra = SliceRadius(a, p), rb = SliceRadius(b, p), rab = SliceRadius(ab, p);
  EXPECT_NEAR(rab * rab, ra * ra + rb * rb, 1e-15);
}

TEST(FunctionalRn, EmptyIsZero) {
  const auto p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  EXPECT_EQ(FunctionalRn({}, {}, {}, 0.5, p), 0.0);
}

TEST(FunctionalRn, GeometricSumWithConstantDelta) {
  ThresholdProfile p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  p.delta.assign(13, 0.01);
  CoeffVector theta;
  const WaveletIndex idx = WaveletIndex::Wavelet(6, 1);
  theta.Set(idx, -0.3);
  double geometric = 0.0;
  for (int l = 0; l <= 12; ++l) geometric += std::exp2(0.5 * l);
  EXPECT_NEAR(FunctionalRn({idx}, theta, {}, 0.0, p), 0.3 * std::exp2(-3.0) * 0.01 * geometric, 1e-14);
  EXPECT_LE(FunctionalRn({idx}, theta, {}, 1.0, p), FunctionalRn({idx}, theta, {}, 0.0, p));
}

TEST(Assumption1, EmptyKeyMarginIsMinusCOverN) {
  const auto p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  CoeffVector theta;
  theta.Set(WaveletIndex::Wavelet(3, 1), 0.01);
  const PartitionKey key = ClassifyPartition(theta, {}, CCoefficients(Db2(), theta), p, 2.0);
  ASSERT_TRUE(key.empty());
  const MarginReport r = Assumption1Margin(Db2(), key, theta, {}, p, 2.0, 0.1, 10.0, 1.0);
  EXPECT_NEAR(r.margin, -10.0 / 4096.0, 1e-15);
}

TEST(Assumption1, HighRegimeSlicesHaveNegativeMargin) {
  TruthSpec ts;
  ts.max_level = 6;
  const LogDensityModel truth = MakeTruth(ts, Db2());
  const auto p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  Rng rng(11);
  for (int d = 0; d < 200; ++d) {
    const CoeffVector theta = SampleSliceMember(Db2(), truth.theta(), p, 2.0, rng);
    const PartitionKey key = ClassifyPartition(theta, truth.theta(), CCoefficients(Db2(), theta), p, 2.0);
    ASSERT_FALSE(key.empty());
    const MarginReport r = Assumption1Margin(Db2(), key, theta, truth.theta(), p, 2.0, 0.1, 10.0, 1.0);
    EXPECT_LE(r.mixed_norm, 0.5);
    EXPECT_LT(r.margin, 0.0) << "draw " << d;
  }
}

TEST(Assumption1, RejectsThetaOutsideTheCell) {
  const auto p = ThresholdProfile::Make(4096, 1.0, 1.0, 4, 0.5, 12);
  CoeffVector theta;
  theta.Set(WaveletIndex::Wavelet(6, 0), 0.2);
  EXPECT_THROW(Assumption1Margin(Db2(), PartitionKey{}, theta, {}, p, 2.0, 0.1, 10.0, 1.0),
               std::invalid_argument);
}

class Lemma2 : public ::testing::Test {
 protected:
  void SetUp() override {
    TruthSpec ts;
    ts.max_level = 5;
    truth = std::make_unique<LogDensityModel>(MakeTruth(ts, Db2()));
    Rng rng(3);
    data = SampleData(*truth, 2000, rng);
  }
  std::unique_ptr<LogDensityModel> truth;
  Dataset data;
  std::vector<WaveletIndex> indices{WaveletIndex::Wavelet(6, 3)};
};

TEST_F(Lemma2, ZeroGHasNoResidual) {
  CoeffVector gamma;
  gamma.Set(WaveletIndex::Wavelet(4, 2), 0.01);
  for (const auto& [idx, v] : truth->theta()) gamma.Add(idx, v);
  const auto r = Lemma2Residual(Db2(), indices, {}, gamma, truth->theta(), data, 0.2);
  EXPECT_LE(r.residual, 1e-8);
}

TEST_F(Lemma2, ResidualIsThirdOrder) {
  CoeffVector alpha, gamma;
  alpha.Set(indices[0], 0.002);
  gamma.Set(WaveletIndex::Wavelet(5, 7), 0.003);
  for (const auto& [idx, v] : truth->theta()) gamma.Add(idx, v);
  const auto full = Lemma2Residual(Db2(), indices, alpha, gamma, truth->theta(), data, 0.05);
  EXPECT_LE(full.residual, 5.0 * 0.05 * full.p0_g2);
  EXPECT_GE(full.residual_plus, full.residual);
}

TEST_F(Lemma2, PreconditionsAreEnforced) {
  CoeffVector alpha;
  alpha.Set(indices[0], 1.0);
  EXPECT_THROW(Lemma2Residual(Db2(), indices, alpha, {}, truth->theta(), data, 0.05),
               std::invalid_argument);
  EXPECT_THROW(Lemma2Residual(Db2(), indices, {}, {}, truth->theta(), data, 1.5), std::invalid_argument);
  EXPECT_THROW(Lemma2Residual(Db2(), indices, {}, {}, truth->theta(), Dataset{}, 0.05),
               std::invalid_argument);
}

TEST(Lemma6, SingleSmallPerturbationIsFinitePositive) {
  TruthSpec ts;
  const LogDensityModel truth = MakeTruth(ts, Db2());
  CoeffVector alpha;
  const WaveletIndex idx = WaveletIndex::Wavelet(5, 4);
  alpha.Set(idx, truth.theta().Get(idx) + 0.01);
  const double r = Lemma6Ratio(Db2(), {idx}, alpha, truth.theta(), 4, 1.0);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
}

TEST(Lemma6, SignBalancedPerturbationHasZeroRatio) {
  // Uniform truth: P0[psi] = 0 for every wavelet, so any g has P0[g] = 0.
  const LogDensityModel uniform(Db2());
  CoeffVector alpha;
  const std::vector<WaveletIndex> idx{WaveletIndex::Wavelet(5, 4), WaveletIndex::Wavelet(5, 9)};
  alpha.Set(idx[0], 0.02);
  alpha.Set(idx[1], -0.02);
  EXPECT_NEAR(Lemma6Ratio(Db2(), idx, alpha, uniform.theta(), 4, 1.0), 0.0, 1e-20);
}

TEST(Lemma6, ErrorsOnDegenerateInput) {
  const LogDensityModel uniform(Db2());
  EXPECT_THROW(Lemma6Ratio(Db2(), {WaveletIndex::Wavelet(5, 0)}, {}, uniform.theta(), 4, 1.0),
               std::domain_error);
  CoeffVector alpha;
  alpha.Set(WaveletIndex::Wavelet(4, 0), 0.1);
  EXPECT_THROW(Lemma6Ratio(Db2(), {WaveletIndex::Wavelet(4, 0)}, alpha, uniform.theta(), 4, 1.0),
               std::invalid_argument);
}

TEST(KlMass, WideBallHoldsEverything) {
  const WaveletBasis haar(BasisSpec{1, 0, 10});
  const LogDensityModel uniform(haar);
  const SpikeSlabPrior prior(PriorSpec{}, 2);
  Rng rng(2);
  const auto m = PriorKlBallMass(prior, haar, uniform, std::sqrt(10.0), 2000, rng);
  EXPECT_GE(m.estimate, 0.99);
}

TEST(KlMass, MatchesGoldenEstimate) {
  const WaveletBasis haar(BasisSpec{1, 0, 10});
  const LogDensityModel uniform(haar);
  const SpikeSlabPrior prior(PriorSpec{}, 2);
  Rng rng(99);
  const auto m = PriorKlBallMass(prior, haar, uniform, 0.1, 20000, rng);
  const double se = std::hypot(m.std_error, kGoldenKlMassSe);
  EXPECT_NEAR(m.estimate, kGoldenKlMass, 4.0 * se);
  EXPECT_GT(m.upper95, m.estimate);
}

TEST(KlMass, ZeroHitsGiveUpperBound) {
  const WaveletBasis haar(BasisSpec{1, 0, 10});
  CoeffVector far;
  far.Set(WaveletIndex::Wavelet(0, 0), 3.0);
  const LogDensityModel truth(haar, far);
  PriorSpec spec;
  spec.omega_rule = OmegaRule::kExplicit;
  spec.omega_explicit.assign(3, 0.0);
  const SpikeSlabPrior prior(spec, 2);
  Rng rng(4);
  const auto m = PriorKlBallMass(prior, haar, truth, 0.01, 1000, rng);
  EXPECT_EQ(m.hits, 0u);
  EXPECT_NEAR(m.upper95, 1.0 - std::pow(0.05, 1.0 / 1000.0), 1e-15);
}

}  // namespace
}  // namespace wavedens
