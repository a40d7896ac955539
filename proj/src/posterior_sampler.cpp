#include "wavedens/posterior_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wavedens/kernels.hpp"

namespace wavedens {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTargetAcceptance = 0.35;
constexpr int kAdaptWindow = 25;
// Widening of the Gaussian birth component relative to the Laplace approximation.
constexpr double kBirthSpread = 1.5;

double PriorAt(const SpikeSlabPrior& prior, const WaveletIndex& idx, double v) {
  const auto lp = prior.LogPriorPoint(idx, v);
  if (!lp) throw std::out_of_range("coefficient above the truncation level: " + idx.ToString());
  return *lp;
}

// Type-7 quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Dataset::Dataset(std::vector<double> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double x = points_[i];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw std::invalid_argument("sample " + std::to_string(i) + " outside [0,1]");
    }
  }
  std::sort(points_.begin(), points_.end());
}

Dataset ReadDataset(std::istream& in) {
  std::vector<double> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: \"" +
                                  token + "\"");
    }
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": value " + token +
                                  " outside [0,1]");
    }
    pts.push_back(x);
  }
  if (pts.empty()) throw std::invalid_argument("data file contains no samples");
  return Dataset(std::move(pts));
}

void SamplerConfig::Validate() const {
  if (sweeps <= 0) throw std::invalid_argument("sweeps must be positive");
  if (burn_in < 0 || burn_in >= sweeps) throw std::invalid_argument("need 0 <= burn_in < sweeps");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (!(rw_step > 0.0)) throw std::invalid_argument("rw_step must be positive");
  if (toggle_attempts_per_sweep < 0) {
    throw std::invalid_argument("toggle_attempts_per_sweep must be >= 0");
  }
  if (spot_check_every < 0) throw std::invalid_argument("spot_check_every must be >= 0");
}

double MoveCounters::rw_rate() const {
  return rw_attempts == 0 ? 0.0 : static_cast<double>(rw_accepts) / static_cast<double>(rw_attempts);
}

double MoveCounters::toggle_rate() const {
  const auto att = birth_attempts + death_attempts;
  return att == 0 ? 0.0
                  : static_cast<double>(birth_accepts + death_accepts) / static_cast<double>(att);
}

CoeffVector EmpiricalInit(const WaveletBasis& basis, const SpikeSlabPrior& prior,
                          const Dataset& data) {
  const std::size_t n = data.size();
  const int top = std::min(prior.truncation_level(), basis.max_level());
  if (n < 40) return {};
  int h = static_cast<int>(std::floor(std::log2(static_cast<double>(n) / 20.0)));
  h = std::clamp(h, basis.coarse_level(), top);
  const std::size_t bins = std::size_t{1} << h;
  std::vector<double> counts(bins, 0.0);
  for (double x : data.points()) counts[std::min(bins - 1, static_cast<std::size_t>(x * bins))] += 1.0;
  const double total = static_cast<double>(n) + 0.5 * static_cast<double>(bins);
  const std::size_t per_bin = basis.cell_count() / bins;
  std::vector<double> integrals(basis.cell_count());
  for (std::size_t b = 0; b < basis.cell_count(); ++b) {
    const double dens = (counts[b / per_bin] + 0.5) / total * static_cast<double>(bins);
    integrals[b] = std::log(dens) * basis.cell_width();
  }
  const double thresh = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
  CoeffVector out;
  for (const auto& [idx, v] : basis.AnalyzeCellIntegrals(integrals, h)) {
    if (!idx.is_scaling() && std::fabs(v) <= thresh) continue;
    const auto lp = prior.LogPriorPoint(idx, v);
    if (lp && std::isfinite(*lp)) out.Set(idx, v);
  }
  return out;
}

ChainState::ChainState(const WaveletBasis& basis, const SpikeSlabPrior& prior, const Dataset& data,
                       CoeffVector init)
    : basis_(&basis),
      prior_(&prior),
      data_(&data),
      n_(data.size()),
      top_level_(prior.truncation_level()),
      model_(basis) {
  if (prior.truncation_level() > basis.max_level()) {
    throw std::invalid_argument("truncation level " + std::to_string(prior.truncation_level()) +
                                " exceeds the basis resolution (max level " +
                                std::to_string(basis.max_level()) + ")");
  }
  if (top_level_ < basis.coarse_level()) {
    throw std::invalid_argument("truncation level below the coarse level");
  }
  for (const auto& [idx, v] : init) {
    if (!basis.Contains(idx) || idx.j > top_level_) {
      throw std::invalid_argument("initial coefficient outside the prior support: " +
                                  idx.ToString());
    }
  }
  model_.Reset(std::move(init));

  std::vector<double> counts(basis.cell_count(), 0.0);
  for (double x : data.points()) counts[basis.CellOf(x)] += 1.0;
  const auto indices = basis.Enumerate(top_level_);
  stats_.resize(indices.size());
  const auto& k = kernels::Active();
  prior_baseline_ = 0.0;
  for (const auto& idx : indices) {
    const CellSpan span = basis.Cells(idx);
    stats_[WaveletBasis::FlatIndex(idx)] =
        k.dot(span.values.data(), counts.data() + span.first, span.values.size());
    prior_baseline_ += PriorAt(prior, idx, 0.0);
  }
  adapt_.assign(top_level_ + 1, 1.0);
  level_attempts_.assign(top_level_ + 1, 0);
  level_accepts_.assign(top_level_ + 1, 0);
  RefreshLogTerms();
  if (!std::isfinite(log_posterior())) {
    throw std::invalid_argument("initial state has a non-finite log-posterior");
  }
}

double ChainState::sufficient_stat(const WaveletIndex& idx) const {
  return stats_.at(WaveletBasis::FlatIndex(idx));
}

void ChainState::RefreshLogTerms() {
  double lin = 0.0;
  double lp = prior_baseline_;
  for (const auto& [idx, v] : model_.theta()) {
    lin += v * stats_[WaveletBasis::FlatIndex(idx)];
    lp += PriorAt(*prior_, idx, v) - PriorAt(*prior_, idx, 0.0);
  }
  log_likelihood_ = lin - static_cast<double>(n_) * model_.log_partition();
  log_prior_ = lp;
}

double ChainState::RecomputeLogLikelihood() const {
  long double s = 0.0L;
  for (double x : data_->points()) s += basis_->Synthesize(model_.theta(), x);
  return static_cast<double>(s) - static_cast<double>(n_) * LogPartition(*basis_, model_.theta());
}

double ChainState::RecomputeLogPrior() const {
  double s = 0.0;
  for (const auto& idx : basis_->Enumerate(top_level_)) {
    s += PriorAt(*prior_, idx, model_.theta().Get(idx));
  }
  return s;
}

double ChainState::LogAcceptance(Move move, const WaveletIndex& idx, double value) {
  return Acceptance(move, idx, value, nullptr);
}

double ChainState::Acceptance(Move move, const WaveletIndex& idx, double value,
                              const BirthProposal* birth) {
  const double old = model_.theta().Get(idx);
  const double log_z_old = model_.log_partition();
  const double log_z = model_.Propose(idx, value);
  pending_ = {idx, value};
  const double dll = (value - old) * stats_[WaveletBasis::FlatIndex(idx)] -
                     static_cast<double>(n_) * (log_z - log_z_old);
  const double dlp = PriorAt(*prior_, idx, value) - PriorAt(*prior_, idx, old);
  switch (move) {
    case Move::kRandomWalk:
      return dll + dlp;
    case Move::kBirth: {
      const BirthProposal p = birth ? *birth : MakeBirthProposal(idx, old, log_z_old);
      return dll + dlp - LogBirthDensity(idx, value, p);
    }
    case Move::kDeath:
      return dll + dlp + LogBirthDensity(idx, old, MakeBirthProposal(idx, old, log_z));
  }
  return kNegInf;
}

ChainState::BirthProposal ChainState::MakeBirthProposal(const WaveletIndex& idx, double current,
                                                        double log_z_without) const {
  BirthProposal p;
  if (n_ == 0) return p;
  const CellSpan span = basis_->Cells(idx);
  const auto lin = model_.linear_cells();
  const double width = basis_->cell_width();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < span.values.size(); ++i) {
    const double psi = span.values[i];
    const double w = std::exp(lin[span.first + i] - current * psi - log_z_without) * width;
    m1 += w * psi;
    m2 += w * psi * psi;
  }
  const double var = m2 - m1 * m1;
  if (!(var > 1e-12)) return p;
  const double nd = static_cast<double>(n_);
  p.mean = (stats_[WaveletBasis::FlatIndex(idx)] - nd * m1) / (nd * var);
  p.sd = kBirthSpread / std::sqrt(nd * var);
  p.has_gaussian = std::isfinite(p.mean) && std::isfinite(p.sd);
  return p;
}

double ChainState::LogBirthDensity(const WaveletIndex& idx, double value,
                                   const BirthProposal& p) const {
  const double slab = prior_->LogSlab(idx.j, value);
  if (!p.has_gaussian) return slab;
  const double z = (value - p.mean) / p.sd;
  const double gauss = -0.5 * z * z - std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
  const double hi = std::max(slab, gauss);
  return std::log(0.5) + hi + std::log(std::exp(slab - hi) + std::exp(gauss - hi));
}

double ChainState::SampleBirth(const WaveletIndex& idx, const BirthProposal& p, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (!p.has_gaussian || unif(rng) < 0.5) return prior_->SampleSlab(idx.j, rng);
  std::normal_distribution<double> normal(p.mean, p.sd);
  return normal(rng);
}

void ChainState::RebuildCaches() {
  pending_.reset();
  model_.Rebuild();
  RefreshLogTerms();
}

void ChainState::AcceptPending() {
  if (!pending_) throw std::logic_error("AcceptPending() without a proposal");
  model_.Commit();
  pending_.reset();
  RefreshLogTerms();
}

void ChainState::Sweep(Rng& rng, const SamplerConfig& config) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto accept = [&](double log_alpha) {
    return log_alpha >= 0.0 || (log_alpha > kNegInf && std::log(unif(rng)) < log_alpha);
  };

  std::vector<WaveletIndex> active;
  active.reserve(model_.theta().size());
  for (const auto& [idx, v] : model_.theta()) active.push_back(idx);
  for (const auto& idx : active) {
    const double v = model_.theta().Get(idx);
    const double step = config.rw_step * prior_->slab_scale(idx.j) * adapt_[idx.j];
    const double proposal = v + step * normal(rng);
    if (proposal == 0.0) continue;
    const double la = LogAcceptance(Move::kRandomWalk, idx, proposal);
    ++counters_.rw_attempts;
    ++level_attempts_[idx.j];
    if (accept(la)) {
      AcceptPending();
      ++counters_.rw_accepts;
      ++level_accepts_[idx.j];
    }
  }

  // Level first, then a position inside it; the scaling block counts as its
  // own group. The choice does not depend on the state, so it cancels in the
  // birth/death ratio.
  const int j0 = basis_->coarse_level();
  std::uniform_int_distribution<int> group(j0 - 1, top_level_);
  for (int t = 0; t < config.toggle_attempts_per_sweep; ++t) {
    const int g = group(rng);
    const int j = std::max(g, j0);
    std::uniform_int_distribution<int> pos(0, (1 << j) - 1);
    const WaveletIndex idx =
        g < j0 ? WaveletIndex::Scaling(j0, pos(rng)) : WaveletIndex::Wavelet(j, pos(rng));
    if (!prior_->HasSpike(idx)) continue;
    const double v = model_.theta().Get(idx);
    if (v == 0.0) {
      const BirthProposal p = MakeBirthProposal(idx, 0.0, model_.log_partition());
      double w = 0.0;
      while (w == 0.0) w = SampleBirth(idx, p, rng);
      ++counters_.birth_attempts;
      if (accept(Acceptance(Move::kBirth, idx, w, &p))) {
        AcceptPending();
        ++counters_.birth_accepts;
      }
    } else {
      ++counters_.death_attempts;
      if (accept(LogAcceptance(Move::kDeath, idx, 0.0))) {
        AcceptPending();
        ++counters_.death_accepts;
      }
    }
  }
  pending_.reset();
}

void ChainState::AdaptSteps() {
  for (std::size_t j = 0; j < adapt_.size(); ++j) {
    if (level_attempts_[j] >= 8) {
      const double rate =
          static_cast<double>(level_accepts_[j]) / static_cast<double>(level_attempts_[j]);
      adapt_[j] = std::clamp(adapt_[j] * std::exp(1.5 * (rate - kTargetAcceptance)), 1e-2, 1e2);
    }
    level_attempts_[j] = 0;
    level_accepts_[j] = 0;
  }
}

PosteriorSummary Run(ChainState& state, const SamplerConfig& config, const RunOptions& options) {
  config.Validate();
  if (options.grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  const WaveletBasis& basis = state.basis();
  if (options.reference_cells && options.reference_cells->size() != basis.cell_count()) {
    throw std::invalid_argument("reference must have one value per basis cell");
  }
  Rng rng(config.seed);
  PosteriorSummary summary;
  const std::size_t g = options.grid_points;
  summary.grid.resize(g);
  std::vector<std::size_t> grid_cells(g);
  for (std::size_t i = 0; i < g; ++i) {
    summary.grid[i] = static_cast<double>(i) / static_cast<double>(g - 1);
    grid_cells[i] = basis.CellOf(summary.grid[i]);
  }
  std::vector<std::vector<double>> curves;
  std::map<WaveletIndex, std::size_t> hits;

  for (int s = 0; s < config.sweeps; ++s) {
    const bool adapting = config.adapt_during_burn_in && s < config.burn_in;
    state.Sweep(rng, config);
    if (adapting && (s + 1) % kAdaptWindow == 0) state.AdaptSteps();
    if (config.spot_check_every > 0 && (s + 1) % config.spot_check_every == 0) {
      const double fresh = state.RecomputeLogLikelihood();
      if (std::fabs(fresh - state.log_likelihood()) > 1e-8) {
        throw std::runtime_error("log-likelihood cache drifted at sweep " + std::to_string(s + 1));
      }
      state.RebuildCaches();
    }
    if (s < config.burn_in || (s - config.burn_in) % config.thin != 0) continue;

    ++summary.draws;
    for (const auto& [idx, v] : state.theta()) ++hits[idx];
    std::vector<double> curve(g);
    for (std::size_t i = 0; i < g; ++i) curve[i] = state.model().LogDensityOnCell(grid_cells[i]);
    curves.push_back(std::move(curve));
    if (options.reference_cells) {
      const auto lin = state.model().linear_cells();
      const double log_z = state.model().log_partition();
      const auto& ref = *options.reference_cells;
      double worst = 0.0;
      for (std::size_t b = 0; b < lin.size(); ++b) {
        worst = std::max(worst, std::fabs(lin[b] - log_z - ref[b]));
      }
      summary.sup_distance.push_back(worst);
    }
    if (options.draw_stream) {
      *options.draw_stream
          << state.theta().ToJson(basis.coarse_level(), basis.vanishing_moments()).dump() << '\n';
    }
    if (options.on_draw) options.on_draw(state);
  }

  for (const auto& [idx, c] : hits) {
    summary.inclusion[idx] = static_cast<double>(c) / static_cast<double>(summary.draws);
  }
  auto resize = [g](PosteriorSummary::Band& b) {
    b.mean.resize(g);
    b.q05.resize(g);
    b.q50.resize(g);
    b.q95.resize(g);
  };
  resize(summary.lambda);
  resize(summary.density);
  std::vector<double> column(curves.size());
  std::vector<double> dens(curves.size());
  for (std::size_t i = 0; i < g && !curves.empty(); ++i) {
    for (std::size_t d = 0; d < curves.size(); ++d) column[d] = curves[d][i];
    std::sort(column.begin(), column.end());
    double m = 0.0;
    double pm = 0.0;
    for (std::size_t d = 0; d < column.size(); ++d) {
      dens[d] = std::exp(column[d]);
      m += column[d];
      pm += dens[d];
    }
    const double count = static_cast<double>(column.size());
    summary.lambda.mean[i] = m / count;
    summary.lambda.q05[i] = Quantile(column, 0.05);
    summary.lambda.q50[i] = Quantile(column, 0.50);
    summary.lambda.q95[i] = Quantile(column, 0.95);
    summary.density.mean[i] = pm / count;
    summary.density.q05[i] = Quantile(dens, 0.05);
    summary.density.q50[i] = Quantile(dens, 0.50);
    summary.density.q95[i] = Quantile(dens, 0.95);
  }
  return summary;
}

void PosteriorSummary::WriteBandCsv(std::ostream& out, bool density_band) const {
  const Band& b = density_band ? density : lambda;
  out << "x,mean,q05,q50,q95\n" << std::setprecision(12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << grid[i] << ',' << b.mean[i] << ',' << b.q05[i] << ',' << b.q50[i] << ',' << b.q95[i]
        << '\n';
  }
}

void PosteriorSummary::WriteInclusionCsv(std::ostream& out) const {
  out << "j,k,kind,inclusion\n" << std::setprecision(12);
  for (const auto& [idx, f] : inclusion) {
    out << idx.j << ',' << idx.k << ',' << (idx.is_scaling() ? 's' : 'w') << ',' << f << '\n';
  }
}

namespace {

std::vector<double> GridWeights(const std::vector<double>& grid) {
  const std::size_t m = grid.size();
  std::vector<double> w(m, 0.0);
  if (m == 1) {
    w[0] = 1.0;
    return w;
  }
  const double h = grid[1] - grid[0];
  bool uniform = m % 2 == 1 && m >= 3;
  for (std::size_t i = 1; i < m && uniform; ++i) {
    uniform = std::fabs((grid[i] - grid[i - 1]) - h) <= 1e-9 * std::fabs(h);
  }
  if (uniform) {
    for (std::size_t i = 0; i < m; ++i) {
      const double c = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      w[i] = c * h / 3.0;
    }
    return w;
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double d = 0.5 * (grid[i] - grid[i - 1]);
    w[i - 1] += d;
    w[i] += d;
  }
  return w;
}

}  // namespace

EnumerationResult EnumeratePosterior(const Dataset& data, const WaveletBasis& basis,
                                     const SpikeSlabPrior& prior,
                                     const std::vector<WaveletIndex>& indices,
                                     const std::vector<std::vector<double>>& value_grids) {
  const std::size_t K = indices.size();
  if (K == 0 || K > 5) throw std::invalid_argument("enumeration supports 1 to 5 coefficients");
  if (value_grids.size() != K) throw std::invalid_argument("one value grid per coefficient");
  for (std::size_t a = 0; a < K; ++a) {
    if (!basis.Contains(indices[a]) || indices[a].j > prior.truncation_level()) {
      throw std::invalid_argument("invalid index " + indices[a].ToString());
    }
    if (value_grids[a].empty() || value_grids[a].size() > 41) {
      throw std::invalid_argument("value grids must have 1 to 41 points");
    }
    if (!std::is_sorted(value_grids[a].begin(), value_grids[a].end())) {
      throw std::invalid_argument("value grids must be increasing");
    }
  }

  // Merge cells on which all K functions are constant into segments.
  struct Segment {
    double width = 0.0;
    double count = 0.0;
    std::vector<double> psi;
  };
  std::vector<CellSpan> spans;
  for (const auto& idx : indices) spans.push_back(basis.Cells(idx));
  auto value_at = [&](std::size_t a, std::size_t b) {
    const CellSpan& s = spans[a];
    return (b >= s.first && b < s.end()) ? s.values[b - s.first] : 0.0;
  };
  std::vector<double> counts(basis.cell_count(), 0.0);
  for (double x : data.points()) counts[basis.CellOf(x)] += 1.0;
  std::vector<Segment> segs;
  std::vector<double> current(K);
  for (std::size_t b = 0; b < basis.cell_count(); ++b) {
    for (std::size_t a = 0; a < K; ++a) current[a] = value_at(a, b);
    if (segs.empty() || segs.back().psi != current) segs.push_back({0.0, 0.0, current});
    segs.back().width += basis.cell_width();
    segs.back().count += counts[b];
  }
  const double n = static_cast<double>(data.size());

  // Grid-normalized slab log-densities plus log quadrature weights.
  std::vector<std::vector<double>> log_w(K);
  for (std::size_t a = 0; a < K; ++a) {
    const auto w = GridWeights(value_grids[a]);
    std::vector<double> lq(value_grids[a].size());
    double mass = 0.0;
    for (std::size_t g = 0; g < lq.size(); ++g) {
      lq[g] = prior.LogSlab(indices[a].j, value_grids[a][g]);
      mass += w[g] * std::exp(lq[g]);
    }
    if (!(mass > 0.0)) throw std::invalid_argument("value grid misses the slab mass");
    log_w[a].resize(lq.size());
    for (std::size_t g = 0; g < lq.size(); ++g) {
      log_w[a][g] = lq[g] - std::log(mass) + (w[g] > 0.0 ? std::log(w[g]) : kNegInf);
    }
  }

  const std::size_t patterns = std::size_t{1} << K;
  std::vector<double> log_mass(patterns, kNegInf);
  std::vector<std::vector<double>> cond_mean(patterns, std::vector<double>(K, 0.0));
  std::vector<double> lam(segs.size());
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double lp = 0.0;
    bool allowed = true;
    std::vector<std::size_t> act;
    for (std::size_t a = 0; a < K; ++a) {
      const bool on = (mask >> a) & 1U;
      if (!prior.HasSpike(indices[a])) {
        if (!on) allowed = false;
        if (on) act.push_back(a);
        continue;
      }
      const double w = prior.omega(indices[a].j);
      lp += on ? std::log(w) : std::log1p(-w);
      if (on) act.push_back(a);
    }
    if (!allowed || !std::isfinite(lp)) continue;

    std::vector<std::size_t> pos(act.size(), 0);
    double m = kNegInf;
    double s = 0.0;
    std::vector<double> sv(K, 0.0);
    for (;;) {
      double term = 0.0;
      std::fill(lam.begin(), lam.end(), 0.0);
      for (std::size_t t = 0; t < act.size(); ++t) {
        const std::size_t a = act[t];
        const double v = value_grids[a][pos[t]];
        term += log_w[a][pos[t]];
        for (std::size_t q = 0; q < segs.size(); ++q) lam[q] += v * segs[q].psi[a];
      }
      double zmax = kNegInf;
      for (double l : lam) zmax = std::max(zmax, l);
      double z = 0.0;
      double lin = 0.0;
      for (std::size_t q = 0; q < segs.size(); ++q) {
        z += segs[q].width * std::exp(lam[q] - zmax);
        lin += segs[q].count * lam[q];
      }
      term += lin - n * (std::log(z) + zmax);
      if (term > kNegInf) {
        if (term > m) {
          const double scale = m == kNegInf ? 0.0 : std::exp(m - term);
          s *= scale;
          for (double& x : sv) x *= scale;
          m = term;
        }
        const double e = std::exp(term - m);
        s += e;
        for (std::size_t t = 0; t < act.size(); ++t) sv[act[t]] += e * value_grids[act[t]][pos[t]];
      }
      std::size_t t = 0;
      while (t < act.size() && ++pos[t] == value_grids[act[t]].size()) pos[t++] = 0;
      if (t == act.size()) break;
    }
    if (s > 0.0) {
      log_mass[mask] = lp + m + std::log(s);
      for (std::size_t a : act) cond_mean[mask][a] = sv[a] / s;
    }
  }

  const double top = *std::max_element(log_mass.begin(), log_mass.end());
  double total = 0.0;
  EnumerationResult r;
  r.indices = indices;
  r.pattern_probability.resize(patterns);
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    r.pattern_probability[mask] = log_mass[mask] == kNegInf ? 0.0 : std::exp(log_mass[mask] - top);
    total += r.pattern_probability[mask];
  }
  r.inclusion.assign(K, 0.0);
  r.mean_given_active.assign(K, 0.0);
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    r.pattern_probability[mask] /= total;
    for (std::size_t a = 0; a < K; ++a) {
      if ((mask >> a) & 1U) {
        r.inclusion[a] += r.pattern_probability[mask];
        r.mean_given_active[a] += r.pattern_probability[mask] * cond_mean[mask][a];
      }
    }
  }
  for (std::size_t a = 0; a < K; ++a) {
    if (r.inclusion[a] > 0.0) r.mean_given_active[a] /= r.inclusion[a];
  }
  return r;
}

}  // namespace wavedens
