#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/logdensity_model.hpp"
#include "wavedens/posterior_sampler.hpp"
#include "wavedens/spike_slab_prior.hpp"
#include "wavedens/wavelet_basis.hpp"

namespace wavedens {

enum class TruthConstruction { kRandomSigns, kExplicitTable };

struct TruthSpec {
  double beta = 1.0;
  double tau = 0.4;
  int max_level = 6;  // L0
  std::uint64_t sign_seed = 7;
  TruthConstruction construction = TruthConstruction::kRandomSigns;
  // Wavelet coefficients for kExplicitTable; scaling entries are ignored.
  CoeffVector table;
};

// lambda_0 = sum theta0 psi with every wavelet coefficient at levels
// j0..L0 equal to tau * (+-1) * 2^{-j(beta+1/2)}. The scaling coefficients are
// then recovered by analyzing the normalized log-density, so c(theta0) = 0
// for the stored vector. Throws std::invalid_argument when ||lambda_0||_inf > 3
// or L0 exceeds the basis.
LogDensityModel MakeTruth(const TruthSpec& spec, const WaveletBasis& basis);

// Exact inverse-CDF sampling: the truth is constant on the basis cells, so its
// CDF is piecewise linear on the cell grid and is inverted by bisection over
// the cumulative table. Throws std::invalid_argument for n == 0.
Dataset SampleData(const LogDensityModel& truth, std::size_t n, Rng& rng);

struct ExperimentConfig {
  TruthSpec truth;
  PriorSpec prior;
  SamplerConfig sampler;
  int vanishing_moments = 2;
  int coarse_level = 2;
  // 0 picks max(12, J_n + 3) for each n.
  int eval_resolution = 0;
  std::vector<std::size_t> n_grid{250, 500, 1000, 2000, 4000, 8000, 16000};
  int replicates = 8;
  std::string output_dir = "out";
  std::uint64_t master_seed = 1;
  std::size_t band_points = 4097;
  // Constants of the partition diagnostic.
  double partition_m = 2.0;
  int partition_j0 = 4;
  double partition_eta = 0.5;
  // Write 0 into timing fields so repeated runs are byte-identical.
  bool record_timing = true;

  void Validate() const;
  int TruncationLevel(std::size_t n) const;
  BasisSpec BasisFor(std::size_t n) const;
};

struct ResultRow {
  std::size_t n = 0;
  int replicate = 0;
  double med_sup_err = 0.0;
  double mass[4] = {0.0, 0.0, 0.0, 0.0};  // M = 1, 2, 4, 8
  double frac_empty_partition = 0.0;
  double seconds = 0.0;
  // Diagnostics written to diagnostics.csv.
  double median_curve_sup_err = 0.0;
  double med_l2_dist = 0.0;
  double med_mixed_dist = 0.0;
  double rw_rate = 0.0;
  double toggle_rate = 0.0;
};

inline constexpr double kMassMultipliers[4] = {1.0, 2.0, 4.0, 8.0};

// Seed of the (n, replicate) cell, a pure function of the master seed.
std::uint64_t CellSeed(std::uint64_t master, std::size_t n, int replicate);

// One posterior chain on fresh data. The optional band receives the posterior
// density band on a grid of config.band_points points.
ResultRow RunCell(const ExperimentConfig& config, const WaveletBasis& basis,
                  const LogDensityModel& truth, std::size_t n, int replicate,
                  PosteriorSummary* band = nullptr);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double r_squared = 0.0;
  double target = 0.0;  // beta / (2 beta + 1)
  std::size_t points = 0;
};

// Least squares of log(y) on log(log n / n) over (n, y) pairs. Throws
// std::invalid_argument for fewer than 4 distinct n or non-positive y.
RateFit FitRate(const std::vector<std::pair<double, double>>& points, double beta);

// Per-n median of med_sup_err across replicates; with log_adjusted the errors
// are divided by log n first.
std::vector<std::pair<double, double>> MedianErrors(const std::vector<ResultRow>& rows,
                                                    bool log_adjusted);

void WriteResultsCsv(std::ostream& out, const std::vector<ResultRow>& rows);
void WriteDiagnosticsCsv(std::ostream& out, const std::vector<ResultRow>& rows);
// Columns: fit, slope, intercept, std_error, r_squared, target_exponent, points.
void WriteRatesCsv(std::ostream& out, const RateFit& raw, const RateFit& log_adjusted);
// Median error against n on log axes with the minimax guide line.
void WriteRateSvg(std::ostream& out, const std::vector<ResultRow>& rows, const RateFit& fit);

struct ExperimentOutcome {
  std::vector<ResultRow> rows;  // sorted by (n, replicate)
  RateFit raw;
  RateFit log_adjusted;
};

// Runs every (n, replicate) cell on `jobs` worker threads and writes
// results.csv, diagnostics.csv, rates.csv, plot_rate.svg and
// posterior_band_<n>.csv (replicate 0) under config.output_dir. A failing
// cell is reported as std::runtime_error naming n and the replicate.
ExperimentOutcome RunExperiment(const ExperimentConfig& config, unsigned jobs);

}  // namespace wavedens
