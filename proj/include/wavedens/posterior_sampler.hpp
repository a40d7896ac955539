#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/logdensity_model.hpp"
#include "wavedens/spike_slab_prior.hpp"
#include "wavedens/wavelet_basis.hpp"

namespace wavedens {

// Sorted i.i.d. sample on [0,1].
class Dataset {
 public:
  Dataset() = default;
  // Throws std::invalid_argument for a non-finite point or one outside [0,1].
  explicit Dataset(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<double> points_;
};

// One value per line; blank lines are skipped. Errors carry the line number.
Dataset ReadDataset(std::istream& in);

enum class InitMode { kEmpty, kEmpirical, kPriorDraw };

struct SamplerConfig {
  int sweeps = 2000;
  int burn_in = 500;
  int thin = 2;
  // Random-walk scale; level j uses rw_step * 2^{-j(beta0+1/2)}.
  double rw_step = 0.5;
  int toggle_attempts_per_sweep = 200;
  std::uint64_t seed = 1;
  // Per-level random-walk scale tuning, active during burn-in only.
  bool adapt_during_burn_in = true;
  InitMode init = InitMode::kEmpirical;
  // Cache coherence check period in sweeps (0 disables).
  int spot_check_every = 1000;

  void Validate() const;
};

struct MoveCounters {
  std::uint64_t rw_attempts = 0;
  std::uint64_t rw_accepts = 0;
  std::uint64_t birth_attempts = 0;
  std::uint64_t birth_accepts = 0;
  std::uint64_t death_attempts = 0;
  std::uint64_t death_accepts = 0;

  double rw_rate() const;
  double toggle_rate() const;
};

// Thresholded projection of a histogram log-density estimate, used as a
// starting point that is already close to the posterior bulk.
CoeffVector EmpiricalInit(const WaveletBasis& basis, const SpikeSlabPrior& prior,
                          const Dataset& data);

// MCMC state. Because every basis function is constant on the quadrature
// cells, the log-likelihood reduces to sum theta_{j,k} s_{j,k} - n log Z with
// s_{j,k} = sum_i psi_{j,k}(X_i) precomputed once, so a move costs one
// incremental log-partition update and no pass over the data.
class ChainState {
 public:
  ChainState(const WaveletBasis& basis, const SpikeSlabPrior& prior, const Dataset& data,
             CoeffVector init = {});

  const LogDensityModel& model() const { return model_; }
  const CoeffVector& theta() const { return model_.theta(); }
  const SpikeSlabPrior& prior() const { return *prior_; }
  const WaveletBasis& basis() const { return *basis_; }
  std::size_t n() const { return n_; }
  // Highest level that carries coefficients: min(J_n, basis max level).
  int top_level() const { return top_level_; }
  std::size_t index_count() const { return WaveletBasis::CountUpTo(top_level_); }

  double log_likelihood() const { return log_likelihood_; }
  double log_prior() const { return log_prior_; }
  double log_posterior() const { return log_likelihood_ + log_prior_; }
  const MoveCounters& counters() const { return counters_; }
  double sufficient_stat(const WaveletIndex& idx) const;

  // Independent recomputations from theta and the raw data.
  double RecomputeLogLikelihood() const;
  double RecomputeLogPrior() const;

  // Log acceptance ratio of setting theta[idx] = value by the given move kind.
  // Leaves the proposal pending in the model.
  enum class Move { kRandomWalk, kBirth, kDeath };
  double LogAcceptance(Move move, const WaveletIndex& idx, double value);
  void AcceptPending();
  // Recomputes the model caches from theta, clearing accumulated rounding.
  void RebuildCaches();

  // Birth proposal for idx, built from the state with idx removed: an equal
  // mixture of the level-j slab and a Gaussian centred at the one-step Newton
  // estimate of the conditional mode. Without data only the slab is used.
  struct BirthProposal {
    double mean = 0.0;
    double sd = 0.0;
    bool has_gaussian = false;
  };
  // `current` is the value of idx in the committed state and `log_z_without`
  // the log-partition once idx is set to zero.
  BirthProposal MakeBirthProposal(const WaveletIndex& idx, double current,
                                  double log_z_without) const;
  double LogBirthDensity(const WaveletIndex& idx, double value, const BirthProposal& p) const;
  double SampleBirth(const WaveletIndex& idx, const BirthProposal& p, Rng& rng) const;

  void Sweep(Rng& rng, const SamplerConfig& config);
  // Finishes an adaptation window: rescales per-level steps toward the target
  // acceptance rate.
  void AdaptSteps();
  double step_scale(int j) const { return adapt_[j]; }

 private:
  void RefreshLogTerms();
  double Acceptance(Move move, const WaveletIndex& idx, double value, const BirthProposal* birth);

  const WaveletBasis* basis_;
  const SpikeSlabPrior* prior_;
  const Dataset* data_;
  std::size_t n_;
  int top_level_;
  LogDensityModel model_;
  std::vector<double> stats_;  // by flat index
  double prior_baseline_ = 0.0;
  double log_likelihood_ = 0.0;
  double log_prior_ = 0.0;
  MoveCounters counters_;
  std::vector<double> adapt_;
  std::vector<std::uint64_t> level_attempts_;
  std::vector<std::uint64_t> level_accepts_;
  std::optional<std::pair<WaveletIndex, double>> pending_;
};

struct PosteriorSummary {
  std::size_t draws = 0;
  std::map<WaveletIndex, double> inclusion;  // fraction of draws with idx active
  std::vector<double> grid;
  struct Band {
    std::vector<double> mean, q05, q50, q95;
  };
  Band lambda;
  Band density;
  // Per-draw sup over cells of |lambda_theta - lambda_0| when a reference is given.
  std::vector<double> sup_distance;

  // Columns: x, mean, q05, q50, q95.
  void WriteBandCsv(std::ostream& out, bool density_band = false) const;
  void WriteInclusionCsv(std::ostream& out) const;
};

struct RunOptions {
  std::size_t grid_points = 4097;
  // lambda_0 on the basis cells.
  const std::vector<double>* reference_cells = nullptr;
  // Receives every recorded draw (after burn-in, thinned).
  std::function<void(const ChainState&)> on_draw;
  std::ostream* draw_stream = nullptr;  // JSON lines
};

PosteriorSummary Run(ChainState& state, const SamplerConfig& config, const RunOptions& options = {});

// Exact posterior over at most 5 coefficients by enumerating every activity
// pattern and integrating the active values on tensor grids (composite Simpson
// for uniform odd-sized grids, trapezoid otherwise). The slab is normalized by
// the same grid rule so that no data returns the prior pattern masses exactly.
struct EnumerationResult {
  std::vector<WaveletIndex> indices;
  std::vector<double> pattern_probability;  // bit i of the pattern = indices[i] active
  std::vector<double> inclusion;
  std::vector<double> mean_given_active;
};

EnumerationResult EnumeratePosterior(const Dataset& data, const WaveletBasis& basis,
                                     const SpikeSlabPrior& prior,
                                     const std::vector<WaveletIndex>& indices,
                                     const std::vector<std::vector<double>>& value_grids);

}  // namespace wavedens
