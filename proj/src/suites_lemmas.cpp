#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "wavedens/experiments.hpp"
#include "wavedens/suites.hpp"

namespace wavedens {
namespace {

std::string Join(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream s;
  s << std::setprecision(6);
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) s << ';';
    s << k << '=' << v;
    first = false;
  }
  return s.str();
}

double SupOf(const WaveletBasis& basis, const CoeffVector& theta) {
  std::vector<double> f(basis.cell_count(), 0.0);
  basis.SynthesizeCells(theta, f);
  double m = 0.0;
  for (double v : f) m = std::max(m, std::fabs(v));
  return m;
}

CoeffVector Scaled(const CoeffVector& v, double factor) {
  CoeffVector out;
  for (const auto& [idx, x] : v) out.Set(idx, x * factor);
  return out;
}

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Distinct wavelet indices at levels [lo, hi], drawn uniformly.
std::vector<WaveletIndex> DrawIndices(int lo, int hi, int count, Rng& rng) {
  std::uniform_int_distribution<int> level(lo, hi);
  std::vector<WaveletIndex> out;
  while (static_cast<int>(out.size()) < count) {
    const int j = level(rng);
    std::uniform_int_distribution<int> pos(0, (1 << j) - 1);
    const WaveletIndex idx = WaveletIndex::Wavelet(j, pos(rng));
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  return out;
}

}  // namespace

void Lemma2Checks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const ExperimentConfig& e = config.experiment;
  const WaveletBasis basis(BasisSpec{e.vanishing_moments, e.coarse_level, 12});
  TruthSpec ts = e.truth;
  ts.beta = t.betas.front();
  ts.max_level = std::min(ts.max_level, 6);
  const LogDensityModel truth = MakeTruth(ts, basis);
  const CoeffVector& theta0 = truth.theta();
  Rng rng(t.seed + 2);
  const Dataset data = SampleData(truth, t.lemma2_n, rng);
  const int lo = std::max(e.coarse_level, t.j0) + 1;
  const int hi = std::min(lo + 3, basis.resolution() - 2);
  const double b = t.lemma2_b;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);

  double zero_residual = 0.0;
  double worst_ratio = 0.0, worst_ratio_plus = 0.0;
  std::vector<double> halving;
  for (int d = 0; d < t.lemma2_draws; ++d) {
    const auto indices = DrawIndices(lo, hi, size(rng), rng);
    CoeffVector a;
    for (const auto& idx : indices) a.Set(idx, normal(rng));
    a = Scaled(a, (0.2 + 0.75 * unit(rng)) * b / SupOf(basis, a));
    CoeffVector bvec;
    for (const auto& idx : DrawIndices(e.coarse_level, hi, 5, rng)) {
      if (std::find(indices.begin(), indices.end(), idx) == indices.end()) bvec.Set(idx, normal(rng));
    }
    if (bvec.empty()) continue;
    bvec = Scaled(bvec, (0.1 + 0.3 * unit(rng)) * b / SupOf(basis, bvec));

    CoeffVector theta0_i, theta0_c;
    for (const auto& [idx, v] : theta0) {
      if (std::find(indices.begin(), indices.end(), idx) != indices.end()) {
        theta0_i.Set(idx, v);
      } else {
        theta0_c.Set(idx, v);
      }
    }
    const Lemma2Report full = Lemma2Residual(basis, indices, theta0_i + a, theta0_c + bvec, theta0, data, b);
    const Lemma2Report half = Lemma2Residual(basis, indices, theta0_i + Scaled(a, 0.5),
                                             theta0_c + Scaled(bvec, 0.5), theta0, data, 0.5 * b);
    const double unit_scale = b * full.p0_g2;
    worst_ratio = std::max(worst_ratio, full.residual / unit_scale);
    worst_ratio_plus = std::max(worst_ratio_plus, full.residual_plus / unit_scale);
    if (full.residual > 0.0) halving.push_back(half.residual / full.residual);
    if (d < 20) {
      const Lemma2Report zero = Lemma2Residual(basis, indices, theta0_i, theta0_c + bvec, theta0, data, b);
      zero_residual = std::max(zero_residual, zero.residual);
    }
  }

  const std::string params = Join({{"B", b}, {"n", static_cast<double>(t.lemma2_n)},
                                   {"draws", static_cast<double>(t.lemma2_draws)}});
  rows.push_back({"lemma2_zero_g", params, zero_residual, zero_residual <= 1e-8});
  rows.push_back({"lemma2_envelope", params + ";envelope=" + std::to_string(t.lemma2_envelope),
                  worst_ratio, worst_ratio <= t.lemma2_envelope});
  // Informational: the cross term with the opposite sign.
  rows.push_back({"lemma2_envelope_plus_sign", params, worst_ratio_plus, true});
  const double med = Median(halving);
  rows.push_back({"lemma2_halving_ratio", params, med, med <= 0.7});
}

void Lemma6Checks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const ExperimentConfig& e = config.experiment;
  const WaveletBasis basis(BasisSpec{e.vanishing_moments, e.coarse_level, 12});
  const double beta = t.betas.front();
  TruthSpec ts = e.truth;
  ts.beta = beta;
  ts.max_level = std::min(ts.max_level, 6);
  const CoeffVector theta0 = MakeTruth(ts, basis).theta();

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 4);
  std::vector<double> raw_max;
  for (int j0 : t.lemma6_j0) {
    Rng rng(t.seed + 6);
    const int hi = std::min(j0 + 3, basis.resolution() - 2);
    double worst = 0.0;
    for (int d = 0; d < t.lemma6_draws; ++d) {
      const auto indices = DrawIndices(j0 + 1, hi, size(rng), rng);
      CoeffVector alpha;
      for (const auto& idx : indices) {
        alpha.Set(idx, theta0.Get(idx) + normal(rng) * std::exp2(-idx.j * (beta + 0.5)));
      }
      worst = std::max(worst, Lemma6Ratio(basis, indices, alpha, theta0, j0, beta));
    }
    raw_max.push_back(worst * std::exp2(-2.0 * j0 * beta));
    rows.push_back({"lemma6_ratio_max",
                    Join({{"J0", static_cast<double>(j0)}, {"beta", beta},
                          {"draws", static_cast<double>(t.lemma6_draws)}}),
                    worst, std::isfinite(worst)});
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < raw_max.size(); ++i) {
    if (raw_max[i] > raw_max[i - 1] * (1.0 + 1e-12)) nonincreasing = false;
  }
  rows.push_back({"lemma6_raw_nonincreasing", Join({{"beta", beta}}),
                  raw_max.empty() ? 0.0 : raw_max.back(), nonincreasing});
}

void KlMassChecks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const WaveletBasis haar(BasisSpec{1, 0, 10});
  const LogDensityModel uniform(haar);
  const SpikeSlabPrior prior(config.experiment.prior, t.kl_levels);
  Rng rng(t.seed + 7);

  const MassEstimate small = PriorKlBallMass(prior, haar, uniform, std::sqrt(t.kl_eps2), t.kl_draws, rng);
  rows.push_back({"prior_kl_mass",
                  Join({{"eps2", t.kl_eps2}, {"levels", static_cast<double>(t.kl_levels)},
                        {"draws", static_cast<double>(t.kl_draws)}, {"hits", static_cast<double>(small.hits)},
                        {"std_error", small.std_error}, {"upper95", small.upper95}}),
                  small.estimate, small.estimate <= small.upper95});

  const std::size_t wide_draws = std::min<std::size_t>(t.kl_draws, 2000);
  const MassEstimate wide = PriorKlBallMass(prior, haar, uniform, std::sqrt(10.0), wide_draws, rng);
  rows.push_back({"prior_kl_mass_wide",
                  Join({{"eps2", 10.0}, {"draws", static_cast<double>(wide_draws)}}), wide.estimate,
                  wide.estimate >= 0.99});

  // Reported only: the smallest C with mass >= exp(-C n eps_n^2) along a grid of n.
  const double beta = t.betas.front();
  double c_fit = 0.0;
  const std::size_t trend_draws = std::max<std::size_t>(t.kl_draws / 4, 1);
  for (int lg = 6; lg <= 9; ++lg) {
    const double n = std::exp2(lg);
    const SpikeSlabPrior pn(config.experiment.prior, lg);
    const double eps = MinimaxRate(n, beta);
    const MassEstimate m = PriorKlBallMass(pn, haar, uniform, eps, trend_draws, rng);
    const double mass = m.hits > 0 ? m.estimate : m.upper95;
    c_fit = std::max(c_fit, -std::log(mass) / (n * eps * eps));
  }
  rows.push_back({"prior_kl_mass_trend_C",
                  Join({{"beta", beta}, {"draws", static_cast<double>(trend_draws)}}), c_fit, true});
}

}  // namespace wavedens
