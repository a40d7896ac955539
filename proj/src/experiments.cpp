#include "wavedens/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "wavedens/metrics.hpp"
#include "wavedens/theory_checks.hpp"

namespace wavedens {
namespace {

constexpr double kMaxTruthSup = 3.0;
constexpr double kTruthDropBelow = 1e-13;

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

LogDensityModel MakeTruth(const TruthSpec& spec, const WaveletBasis& basis) {
  if (spec.max_level > basis.max_level()) {
    throw std::invalid_argument("truth level L0 = " + std::to_string(spec.max_level) +
                                " exceeds the basis maximum level " +
                                std::to_string(basis.max_level()));
  }
  if (!(spec.beta > 0.0) || !(spec.tau >= 0.0)) {
    throw std::invalid_argument("truth needs beta > 0 and tau >= 0");
  }
  CoeffVector raw;
  if (spec.construction == TruthConstruction::kRandomSigns) {
    Rng rng(spec.sign_seed);
    std::bernoulli_distribution coin(0.5);
    for (int j = basis.coarse_level(); j <= spec.max_level; ++j) {
      const double size = spec.tau * std::exp2(-j * (spec.beta + 0.5));
      for (int k = 0; k < (1 << j); ++k) {
        raw.Set(WaveletIndex::Wavelet(j, k), coin(rng) ? size : -size);
      }
    }
  } else {
    for (const auto& [idx, v] : spec.table) {
      if (idx.is_scaling()) continue;
      if (!basis.Contains(idx)) {
        throw std::invalid_argument("truth table index not in the basis: " + idx.ToString());
      }
      raw.Set(idx, v);
    }
  }

  std::vector<double> lambda(basis.cell_count(), 0.0);
  basis.SynthesizeCells(raw, lambda);
  const double log_z = LogPartition(basis, raw);
  double sup = 0.0;
  for (double& x : lambda) {
    x -= log_z;
    sup = std::max(sup, std::fabs(x));
  }
  if (sup > kMaxTruthSup) {
    throw std::invalid_argument("truth amplitude too large: ||lambda_0||_inf = " +
                                std::to_string(sup));
  }
  const int top = std::max(spec.max_level, raw.MaxLevel().value_or(basis.coarse_level()));
  for (double& x : lambda) x *= basis.cell_width();
  return LogDensityModel(basis, basis.AnalyzeCellIntegrals(lambda, top, kTruthDropBelow));
}

Dataset SampleData(const LogDensityModel& truth, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("cannot sample an empty dataset");
  const WaveletBasis& basis = truth.basis();
  const std::size_t cells = basis.cell_count();
  std::vector<double> cum(cells);
  double total = 0.0;
  for (std::size_t b = 0; b < cells; ++b) {
    total += std::exp(truth.LogDensityOnCell(b)) * basis.cell_width();
    cum[b] = total;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> points(n);
  for (auto& x : points) {
    const double u = unif(rng) * total;
    const std::size_t b = std::min<std::size_t>(
        cells - 1, static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()));
    const double below = b == 0 ? 0.0 : cum[b - 1];
    const double frac = std::clamp((u - below) / (cum[b] - below), 0.0, 1.0);
    x = std::min(1.0, (static_cast<double>(b) + frac) * basis.cell_width());
  }
  return Dataset(std::move(points));
}

void ExperimentConfig::Validate() const {
  if (n_grid.empty()) throw std::invalid_argument("n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw std::invalid_argument("every n must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("n_grid must be strictly increasing");
    }
  }
  if (replicates < 3) throw std::invalid_argument("replicates must be >= 3");
  if (band_points < 2) throw std::invalid_argument("band_points must be >= 2");
  if (!(partition_m > 0.0) || !(partition_eta > 0.0)) {
    throw std::invalid_argument("partition constants must be positive");
  }
  sampler.Validate();
  for (std::size_t n : n_grid) BasisFor(n).Validate();
  if (truth.max_level < coarse_level) {
    throw std::invalid_argument("truth max_level must be >= coarse_level");
  }
}

int ExperimentConfig::TruncationLevel(std::size_t n) const {
  return prior.truncation_level >= 0 ? prior.truncation_level : DefaultTruncationLevel(n);
}

BasisSpec ExperimentConfig::BasisFor(std::size_t n) const {
  BasisSpec spec;
  spec.vanishing_moments = vanishing_moments;
  spec.coarse_level = coarse_level;
  spec.eval_resolution =
      eval_resolution > 0 ? eval_resolution
                          : std::max({12, TruncationLevel(n) + 3, truth.max_level + 4});
  return spec;
}

std::uint64_t CellSeed(std::uint64_t master, std::size_t n, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                    static_cast<std::uint32_t>(replicate)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ResultRow RunCell(const ExperimentConfig& config, const WaveletBasis& basis,
                  const LogDensityModel& truth, std::size_t n, int replicate,
                  PosteriorSummary* band) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(CellSeed(config.master_seed, n, replicate));
  const Dataset data = SampleData(truth, n, rng);
  const int jn = config.TruncationLevel(n);
  const SpikeSlabPrior prior(config.prior, jn);

  CoeffVector init;
  switch (config.sampler.init) {
    case InitMode::kEmpty:
      break;
    case InitMode::kEmpirical:
      init = EmpiricalInit(basis, prior, data);
      break;
    case InitMode::kPriorDraw:
      init = prior.Sample(basis, rng);
      break;
  }
  ChainState state(basis, prior, data, std::move(init));
  SamplerConfig sampler = config.sampler;
  sampler.seed = rng();

  const double beta = config.truth.beta;
  const double nd = static_cast<double>(n);
  const ThresholdProfile profile =
      ThresholdProfile::Make(nd, beta, std::max(1.0, config.truth.tau), config.partition_j0,
                             config.partition_eta, jn);
  const double eps = MinimaxRate(nd, beta);
  const std::vector<double> reference = truth.LogDensityCells();
  const CoeffVector& theta0 = truth.theta();

  std::vector<double> l2_dist, mixed_dist;
  std::size_t empty = 0;
  RunOptions options;
  options.grid_points = config.band_points;
  options.reference_cells = &reference;
  options.on_draw = [&](const ChainState& s) {
    const CoeffVector c = s.model().c_coefficients();
    const CoeffVector d = s.theta() + c - theta0;
    l2_dist.push_back(d.L2Norm());
    mixed_dist.push_back(MixedNorm1Inf(d));
    if (ClassifyPartition(s.theta(), theta0, c, profile, config.partition_m).empty()) ++empty;
  };
  PosteriorSummary summary = Run(state, sampler, options);

  ResultRow row;
  row.n = n;
  row.replicate = replicate;
  row.med_sup_err = Median(summary.sup_distance);
  const double draws = static_cast<double>(summary.draws);
  for (int m = 0; m < 4; ++m) {
    const double radius = kMassMultipliers[m] * eps;
    const auto inside = std::count_if(summary.sup_distance.begin(), summary.sup_distance.end(),
                                      [radius](double e) { return e <= radius; });
    row.mass[m] = static_cast<double>(inside) / draws;
  }
  row.frac_empty_partition = static_cast<double>(empty) / draws;
  double curve = 0.0;
  for (std::size_t i = 0; i < summary.grid.size(); ++i) {
    curve = std::max(curve,
                     std::fabs(summary.lambda.q50[i] - truth.LogDensityAt(summary.grid[i])));
  }
  row.median_curve_sup_err = curve;
  row.med_l2_dist = Median(l2_dist);
  row.med_mixed_dist = Median(mixed_dist);
  row.rw_rate = state.counters().rw_rate();
  row.toggle_rate = state.counters().toggle_rate();
  if (config.record_timing) {
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (band) *band = std::move(summary);
  return row;
}

}  // namespace wavedens
