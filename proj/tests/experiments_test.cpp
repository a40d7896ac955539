#include "wavedens/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wavedens {
namespace {

const WaveletBasis& Db2() {
  static const WaveletBasis basis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 12});
  return basis;
}

TEST(MakeTruth, PlantsSignedDecayingCoefficients) {
  TruthSpec spec;
  spec.beta = 1.5;
  spec.tau = 0.8;
  spec.max_level = 5;
  const LogDensityModel truth = MakeTruth(spec, Db2());
  std::size_t wavelets = 0;
  for (const auto& [idx, v] : truth.theta()) {
    if (idx.is_scaling()) continue;
    ++wavelets;
    EXPECT_NEAR(std::fabs(v), 0.8 * std::exp2(-idx.j * 2.0), 1e-15) << idx.ToString();
    EXPECT_LE(idx.j, 5);
  }
  EXPECT_EQ(wavelets, 4u + 8u + 16u + 32u);
  EXPECT_NEAR(truth.log_partition(), 0.0, 1e-10);
  for (const auto& [idx, v] : CCoefficients(Db2(), truth.theta())) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(MakeTruth, SignSeedChangesSigns) {
  TruthSpec a, b;
  b.sign_seed = a.sign_seed + 1;
  EXPECT_NE(MakeTruth(a, Db2()).theta(), MakeTruth(b, Db2()).theta());
  EXPECT_EQ(MakeTruth(a, Db2()).theta(), MakeTruth(a, Db2()).theta());
}

TEST(MakeTruth, ExplicitTableRoundTrips) {
  TruthSpec spec;
  spec.construction = TruthConstruction::kExplicitTable;
  spec.table.Set(WaveletIndex::Wavelet(3, 5), 0.25);
  spec.table.Set(WaveletIndex::Wavelet(4, 0), -0.1);
  const LogDensityModel truth = MakeTruth(spec, Db2());
  EXPECT_NEAR(truth.theta().Get(WaveletIndex::Wavelet(3, 5)), 0.25, 1e-12);
  EXPECT_NEAR(truth.theta().Get(WaveletIndex::Wavelet(4, 0)), -0.1, 1e-12);
  EXPECT_NEAR(truth.log_partition(), 0.0, 1e-10);
}

TEST(MakeTruth, RejectsLargeSupNorm) {
  TruthSpec spec;
  spec.tau = 200.0;
  EXPECT_THROW(MakeTruth(spec, Db2()), std::invalid_argument);
  spec.tau = 0.4;
  spec.max_level = 13;
  EXPECT_THROW(MakeTruth(spec, Db2()), std::invalid_argument);
}

class Sampling : public ::testing::Test {
 protected:
  void SetUp() override {
    TruthSpec spec;
    spec.tau = 1.0;
    truth = std::make_unique<LogDensityModel>(MakeTruth(spec, Db2()));
    const std::size_t cells = Db2().cell_count();
    cdf.assign(cells + 1, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      const double mid = (i + 0.5) / cells;
      cdf[i + 1] = cdf[i] + truth->DensityAt(mid) / cells;
      mean += mid * truth->DensityAt(mid) / cells;
      second += (mid * mid + 1.0 / (12.0 * cells * cells)) * truth->DensityAt(mid) / cells;
    }
  }
  double Cdf(double x) const {
    const double pos = x * (cdf.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), cdf.size() - 2);
    return cdf[i] + (pos - i) * (cdf[i + 1] - cdf[i]);
  }
  std::unique_ptr<LogDensityModel> truth;
  std::vector<double> cdf;
  double mean = 0.0, second = 0.0;
};

TEST_F(Sampling, KolmogorovDistanceIsSmall) {
  EXPECT_NEAR(cdf.back(), 1.0, 1e-10);
  Rng rng(12);
  const std::size_t n = 20000;
  const Dataset data = SampleData(*truth, n, rng);
  ASSERT_EQ(data.size(), n);
  ASSERT_TRUE(std::is_sorted(data.points().begin(), data.points().end()));
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = Cdf(data.points()[i]);
    d = std::max({d, std::fabs(f - static_cast<double>(i) / n), std::fabs(f - static_cast<double>(i + 1) / n)});
  }
  // 1% critical value of the one-sample Kolmogorov-Smirnov statistic.
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_F(Sampling, SampleMeanWithinFourStandardErrors) {
  Rng rng(13);
  const std::size_t n = 50000;
  const Dataset data = SampleData(*truth, n, rng);
  double s = 0.0;
  for (double x : data.points()) s += x;
  const double se = std::sqrt((second - mean * mean) / n);
  EXPECT_NEAR(s / n, mean, 4.0 * se);
}

TEST_F(Sampling, ZeroPointsThrows) {
  Rng rng(1);
  EXPECT_THROW(SampleData(*truth, 0, rng), std::invalid_argument);
}

TEST(FitRate, RecoversExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double n : {250.0, 1000.0, 4000.0, 16000.0}) {
    pts.emplace_back(n, 3.0 * std::pow(std::log(n) / n, 0.37));
  }
  const RateFit fit = FitRate(pts, 1.0);
  EXPECT_NEAR(fit.slope, 0.37, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fit.std_error, 0.0, 1e-10);
  EXPECT_DOUBLE_EQ(fit.target, 1.0 / 3.0);
  EXPECT_EQ(fit.points, 4u);
}

TEST(FitRate, RejectsDegenerateInput) {
  EXPECT_THROW(FitRate({{250, 0.1}, {500, 0.08}, {1000, 0.06}}, 1.0), std::invalid_argument);
  EXPECT_THROW(FitRate({{250, 0.1}, {250, 0.1}, {500, 0.08}, {1000, 0.06}}, 1.0), std::invalid_argument);
  EXPECT_THROW(FitRate({{250, 0.1}, {500, 0.0}, {1000, 0.06}, {2000, 0.05}}, 1.0), std::invalid_argument);
}

TEST(MedianErrors, TakesPerNMedianAndLogAdjusts) {
  std::vector<ResultRow> rows(6);
  const double errs[6] = {0.3, 0.1, 0.2, 0.05, 0.07, 0.06};
  for (int i = 0; i < 6; ++i) {
    rows[i].n = i < 3 ? 100 : 400;
    rows[i].replicate = i % 3;
    rows[i].med_sup_err = errs[i];
  }
  const auto raw = MedianErrors(rows, false);
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_DOUBLE_EQ(raw[0].second, 0.2);
  EXPECT_DOUBLE_EQ(raw[1].second, 0.06);
  const auto adjusted = MedianErrors(rows, true);
  EXPECT_DOUBLE_EQ(adjusted[1].second, 0.06 / std::log(400.0));
}

TEST(CellSeed, IsPureAndDistinguishesCells) {
  EXPECT_EQ(CellSeed(1, 500, 2), CellSeed(1, 500, 2));
  EXPECT_NE(CellSeed(1, 500, 2), CellSeed(1, 500, 3));
  EXPECT_NE(CellSeed(1, 500, 2), CellSeed(1, 1000, 2));
  EXPECT_NE(CellSeed(1, 500, 2), CellSeed(2, 500, 2));
}

ExperimentConfig TinyConfig(const std::string& dir) {
  ExperimentConfig config;
  config.n_grid = {100, 200, 400, 800};
  config.replicates = 3;
  config.sampler.sweeps = 60;
  config.sampler.burn_in = 20;
  config.sampler.toggle_attempts_per_sweep = 10;
  config.band_points = 65;
  config.record_timing = false;
  config.output_dir = dir;
  config.master_seed = 5;
  return config;
}

TEST(RunCell, IsDeterministic) {
  const ExperimentConfig config = TinyConfig("unused");
  const WaveletBasis basis(config.BasisFor(200));
  const LogDensityModel truth = MakeTruth(config.truth, basis);
  PosteriorSummary band_a, band_b;
  const ResultRow a = RunCell(config, basis, truth, 200, 1, &band_a);
  const ResultRow b = RunCell(config, basis, truth, 200, 1, &band_b);
  EXPECT_EQ(a.med_sup_err, b.med_sup_err);
  for (int m = 0; m < 4; ++m) EXPECT_EQ(a.mass[m], b.mass[m]);
  EXPECT_EQ(a.seconds, 0.0);
  EXPECT_EQ(band_a.density.mean, band_b.density.mean);
  EXPECT_EQ(band_a.grid.size(), 65u);
  for (int m = 1; m < 4; ++m) EXPECT_GE(a.mass[m], a.mass[m - 1]);
}

TEST(RunExperiment, WritesAllOutputsAndIsJobCountInvariant) {
  const auto root = std::filesystem::temp_directory_path() / "wavedens_experiments_test";
  std::filesystem::remove_all(root);
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const ExperimentOutcome one = RunExperiment(TinyConfig((root / "a").string()), 1);
  const ExperimentOutcome two = RunExperiment(TinyConfig((root / "b").string()), 2);
  ASSERT_EQ(one.rows.size(), 12u);
  for (const char* f : {"results.csv", "diagnostics.csv", "rates.csv", "plot_rate.svg",
                        "posterior_band_100.csv", "posterior_band_800.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(root / "a" / f)) << f;
    EXPECT_EQ(read(root / "a" / f), read(root / "b" / f)) << f;
  }
  const std::string results = read(root / "a" / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')),
            "n,replicate,med_sup_err,mass_M1,mass_M2,mass_M4,mass_M8,frac_empty_partition,seconds");
  EXPECT_EQ(std::count(results.begin(), results.end(), '\n'), 13);
  EXPECT_EQ(one.raw.slope, two.raw.slope);
  std::filesystem::remove_all(root);
}

TEST(ExperimentConfig, ValidateRejectsBadGrids) {
  ExperimentConfig config;
  config.n_grid = {500, 250};
  EXPECT_THROW(config.Validate(), std::invalid_argument);
  config.n_grid = {250, 500};
  config.replicates = 2;
  EXPECT_THROW(config.Validate(), std::invalid_argument);
  config.replicates = 3;
  EXPECT_NO_THROW(config.Validate());
}

}  // namespace
}  // namespace wavedens
