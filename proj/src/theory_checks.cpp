#include "wavedens/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "wavedens/metrics.hpp"

namespace wavedens {
namespace {

double FlatLevel(double n) { return std::sqrt(std::log(n) / n); }

// Values of sum coeffs psi on every basis cell.
std::vector<double> CellsOf(const WaveletBasis& basis, const CoeffVector& coeffs) {
  std::vector<double> out(basis.cell_count(), 0.0);
  basis.SynthesizeCells(coeffs, out);
  return out;
}

CoeffVector Restrict(const CoeffVector& v, const std::set<WaveletIndex>& keep, bool inside) {
  CoeffVector out;
  for (const auto& [idx, x] : v) {
    if ((keep.count(idx) != 0) == inside) out.Set(idx, x);
  }
  return out;
}

double SupAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// P0-weights p0_b |cell| of the truth.
std::vector<double> TruthWeights(const WaveletBasis& basis, const CoeffVector& theta0) {
  const LogDensityModel truth(basis, theta0);
  std::vector<double> w = truth.LogDensityCells();
  for (double& x : w) x = std::exp(x) * basis.cell_width();
  return w;
}

double Expect(const std::vector<double>& w, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) s += w[b] * f[b];
  return s;
}

}  // namespace

double MinimaxRate(double n, double beta) {
  if (!(n >= 2.0) || !(beta > 0.0)) throw std::invalid_argument("minimax rate needs n >= 2 and beta > 0");
  return std::pow(std::log(n) / n, beta / (2.0 * beta + 1.0));
}

ThresholdProfile ThresholdProfile::Make(double n, double beta, double c0, int j0, double eta,
                                        int jn) {
  if (jn < 0) throw std::invalid_argument("threshold profile needs J_n >= 0");
  ThresholdProfile p;
  p.n = n;
  p.beta = beta;
  p.c0 = c0;
  p.regime = beta > 0.5 ? Regime::kHigh : Regime::kLow;
  p.j0 = j0;
  p.eta = eta;
  p.jn = jn;
  p.eps_star = MinimaxRate(n, beta);
  p.delta.resize(static_cast<std::size_t>(jn) + 1);
  for (int j = 0; j <= jn; ++j) {
    const double decay = c0 * std::exp2(-j * (beta + 0.5));
    const double flat =
        p.regime == Regime::kHigh ? FlatLevel(n) : std::exp2(-0.5 * j) * p.eps_star;
    p.delta[static_cast<std::size_t>(j)] = std::min(flat, decay);
  }
  return p;
}

double ThresholdProfile::at(int j) const {
  if (j < 0 || j > jn) throw std::out_of_range("level outside the threshold profile");
  return delta[static_cast<std::size_t>(j)];
}

int JStar(double n, double beta, double c0) {
  const double eps = MinimaxRate(n, beta);
  int best = -1;
  for (int j = 0; j < 4096; ++j) {
    const double decay = c0 * std::exp2(-j * (beta + 0.5));
    const double flat = beta > 0.5 ? FlatLevel(n) : std::exp2(-0.5 * j) * eps;
    if (decay >= flat) {
      best = j;
    } else {
      break;
    }
  }
  return best;
}

double SliceRadius(const std::vector<WaveletIndex>& indices, const ThresholdProfile& profile) {
  double s = 0.0;
  for (const auto& idx : indices) {
    const double d = profile.at(idx.j);
    s += d * d;
  }
  return std::sqrt(s);
}

PartitionKey ClassifyPartition(const CoeffVector& theta, const CoeffVector& theta0,
                               const CoeffVector& c, const ThresholdProfile& profile, double m) {
  PartitionKey key;
  std::set<WaveletIndex> candidates;
  for (const auto& [idx, v] : theta) candidates.insert(idx);
  for (const auto& [idx, v] : theta0) candidates.insert(idx);
  for (const auto& [idx, v] : c) candidates.insert(idx);
  for (const auto& idx : candidates) {
    if (idx.j <= profile.j0 || idx.j > profile.jn) continue;
    const double excess = std::fabs(theta.Get(idx) + c.Get(idx) - theta0.Get(idx));
    if (excess > m * profile.at(idx.j)) key.indices.push_back(idx);
  }
  if (key.indices.empty()) return key;

  double norm2 = 0.0;
  for (const auto& idx : key.indices) {
    const double d = theta.Get(idx) - theta0.Get(idx);
    norm2 += d * d;
  }
  const double r = m * SliceRadius(key.indices, profile);
  // Smallest s >= 1 with ||.||_2^2 <= (s+1) (M r_I)^2.
  const double ratio = norm2 / (r * r);
  int s = std::max(1, static_cast<int>(std::ceil(ratio - 1.0)));
  while (s > 1 && ratio <= s) --s;
  while (ratio > s + 1.0) ++s;
  key.slice = s;
  return key;
}

double FunctionalRn(const std::vector<WaveletIndex>& indices, const CoeffVector& theta,
                    const CoeffVector& theta0, double kappa, const ThresholdProfile& profile) {
  if (kappa < 0.0 || kappa > 1.0) throw std::invalid_argument("kappa must lie in [0,1]");
  double total = 0.0;
  for (const auto& idx : indices) {
    const int j = idx.j;
    double inner = 0.0;
    for (int l = 0; l <= profile.jn; ++l) {
      inner += std::exp2(0.5 * l) * profile.at(l) * std::exp2(-std::max(j, l) * kappa);
    }
    total += std::fabs(theta.Get(idx) - theta0.Get(idx)) * std::exp2(-0.5 * j) * inner;
  }
  return total;
}

MarginReport Assumption1Margin(const WaveletBasis& basis, const PartitionKey& key,
                               const CoeffVector& theta, const CoeffVector& theta0,
                               const ThresholdProfile& profile, double m, double b, double c,
                               double kappa) {
  const CoeffVector cv = CCoefficients(basis, theta);
  if (ClassifyPartition(theta, theta0, cv, profile, m) != key) {
    throw std::invalid_argument("theta does not belong to the given partition cell");
  }
  MarginReport r;
  r.mixed_norm = MixedNorm1Inf(theta + cv - theta0);
  if (r.mixed_norm > profile.eta) {
    throw std::invalid_argument("theta is outside the mixed-norm neighborhood (" +
                                std::to_string(r.mixed_norm) + " > " +
                                std::to_string(profile.eta) + ")");
  }
  double sup_kappa = 0.0;
  const double kappa_prime = std::min(1.0, profile.beta);
  for (int j = 0; j <= profile.jn; ++j) {
    sup_kappa = std::max(sup_kappa, profile.eta + profile.at(j) * std::exp2(j * (kappa + 0.5)));
    r.sup_clause = std::max(r.sup_clause, profile.at(j) * std::exp2(j * (kappa_prime + 0.5)));
  }
  r.lhs = FunctionalRn(key.indices, theta, theta0, kappa_prime, profile) +
          sup_kappa * FunctionalRn(key.indices, theta, theta0, kappa, profile);
  double norm2 = 0.0;
  for (const auto& idx : key.indices) {
    const double d = theta.Get(idx) - theta0.Get(idx);
    norm2 += d * d;
  }
  r.rhs = b * norm2 + c / profile.n;
  r.margin = r.lhs - r.rhs;
  return r;
}

CoeffVector SampleSliceMember(const WaveletBasis& basis, const CoeffVector& theta0,
                              const ThresholdProfile& profile, double m, Rng& rng) {
  if (profile.jn > basis.max_level()) {
    throw std::invalid_argument("basis resolution too low for the threshold profile");
  }
  if (profile.j0 >= profile.jn) throw std::invalid_argument("no levels between j0 and J_n");
  const int max_planted = profile.regime == Regime::kLow ? 2 : 4;
  std::uniform_int_distribution<int> count_dist(1, max_planted);
  std::uniform_int_distribution<int> level_dist(profile.j0 + 1, profile.jn);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int j0 = basis.coarse_level();

  for (int attempt = 0; attempt < 10000; ++attempt) {
    CoeffVector planted;
    const int count = count_dist(rng);
    while (static_cast<int>(planted.size()) < count) {
      const int j = level_dist(rng);
      std::uniform_int_distribution<int> kd(0, (1 << j) - 1);
      const WaveletIndex idx = WaveletIndex::Wavelet(j, kd(rng));
      if (planted.Contains(idx)) continue;
      const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      planted.Set(idx, sign * m * profile.at(j) * (1.05 + 0.95 * unit(rng)));
    }
    CoeffVector noise;
    for (int j = j0; j <= profile.jn; ++j) {
      std::uniform_int_distribution<int> kd(0, (1 << j) - 1);
      for (int t = 0; t < 3; ++t) {
        const WaveletIndex idx = WaveletIndex::Wavelet(j, kd(rng));
        if (planted.Contains(idx)) continue;
        noise.Set(idx, (2.0 * unit(rng) - 1.0) * 0.5 * m * profile.at(j));
      }
    }
    for (double shrink = 1.0; shrink > 1e-3; shrink *= 0.5) {
      CoeffVector delta = planted;
      for (const auto& [idx, v] : noise) delta.Set(idx, shrink * v);
      const CoeffVector theta = theta0 + delta;
      const CoeffVector cv = CCoefficients(basis, theta);
      if (MixedNorm1Inf(theta + cv - theta0) > profile.eta) continue;
      const PartitionKey key = ClassifyPartition(theta, theta0, cv, profile, m);
      if (key.indices.size() == planted.size()) return theta;
    }
  }
  throw std::runtime_error("could not sample a member of the requested partition cell");
}

Lemma2Report Lemma2Residual(const WaveletBasis& basis, const std::vector<WaveletIndex>& indices,
                            const CoeffVector& alpha, const CoeffVector& gamma,
                            const CoeffVector& theta0, const Dataset& data, double b) {
  if (b > 1.0) throw std::invalid_argument("expansion bound B must be <= 1");
  if (data.empty()) throw std::invalid_argument("expansion check needs data");
  const std::set<WaveletIndex> in_i(indices.begin(), indices.end());
  for (const auto& idx : indices) {
    if (idx.is_scaling()) throw std::invalid_argument("I may not contain scaling indices");
  }
  for (const auto& [idx, v] : alpha) {
    if (!in_i.count(idx)) throw std::invalid_argument("alpha has an entry outside I: " + idx.ToString());
  }
  for (const auto& [idx, v] : gamma) {
    if (in_i.count(idx)) throw std::invalid_argument("gamma has an entry inside I: " + idx.ToString());
  }

  const CoeffVector theta0_i = Restrict(theta0, in_i, true);
  const std::vector<double> g = CellsOf(basis, alpha - theta0_i);
  const LogDensityModel truth(basis, theta0);
  const std::vector<double> lambda0 = truth.LogDensityCells();
  const std::vector<double> lambda = LogDensityModel(basis, alpha + gamma).LogDensityCells();
  std::vector<double> h = LogDensityModel(basis, gamma + theta0_i).LogDensityCells();
  for (std::size_t c = 0; c < h.size(); ++c) h[c] -= lambda0[c];

  Lemma2Report r;
  r.sup_g = SupAbs(g);
  r.sup_h = SupAbs(h);
  if (r.sup_g > b || r.sup_h > b) {
    throw std::invalid_argument("sup-norm precondition violated: |g| = " + std::to_string(r.sup_g) +
                                ", |h| = " + std::to_string(r.sup_h) + ", B = " + std::to_string(b));
  }

  std::vector<double> counts(basis.cell_count(), 0.0);
  for (double x : data.points()) counts[basis.CellOf(x)] += 1.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double pn_diff = 0.0, pn_g = 0.0, pn_h = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0.0) continue;
    pn_diff += counts[c] * (lambda[c] - lambda0[c]);
    pn_g += counts[c] * g[c];
    pn_h += counts[c] * h[c];
  }
  pn_diff *= inv_n;
  pn_g *= inv_n;
  pn_h *= inv_n;

  double p0_g = 0.0, p0_g2 = 0.0, cross = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double w = std::exp(lambda0[c]) * basis.cell_width();
    p0_g += w * g[c];
    p0_g2 += w * g[c] * g[c];
    cross += w * g[c] * std::expm1(h[c]);
  }
  const double common = (pn_g - p0_g) - 0.5 * (p0_g2 - p0_g * p0_g) + pn_h;
  r.lhs = pn_diff;
  r.expansion = common - cross;
  r.expansion_plus = common + cross;
  r.residual = std::fabs(r.lhs - r.expansion);
  r.residual_plus = std::fabs(r.lhs - r.expansion_plus);
  r.scale = b * (p0_g2 + p0_g * p0_g);
  r.p0_g = p0_g;
  r.p0_g2 = p0_g2;
  return r;
}

double Lemma6Ratio(const WaveletBasis& basis, const std::vector<WaveletIndex>& indices,
                   const CoeffVector& alpha, const CoeffVector& theta0, int j0, double beta) {
  const std::set<WaveletIndex> in_i(indices.begin(), indices.end());
  for (const auto& idx : indices) {
    if (idx.j <= j0 || idx.is_scaling()) {
      throw std::invalid_argument("I must lie strictly above level j0");
    }
  }
  const std::vector<double> g = CellsOf(basis, Restrict(alpha, in_i, true) - Restrict(theta0, in_i, true));
  const std::vector<double> w = TruthWeights(basis, theta0);
  std::vector<double> g2(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) g2[c] = g[c] * g[c];
  const double mean = Expect(w, g);
  const double second = Expect(w, g2);
  if (!(second > 0.0)) throw std::domain_error("g vanishes identically");
  return mean * mean / (std::exp2(-2.0 * j0 * beta) * second);
}

MassEstimate PriorKlBallMass(const SpikeSlabPrior& prior, const WaveletBasis& basis,
                             const LogDensityModel& truth, double eps, std::size_t draws,
                             Rng& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (draws == 0) throw std::invalid_argument("need at least one Monte Carlo draw");
  const std::vector<double> lambda0 = truth.LogDensityCells();
  std::vector<double> w(lambda0.size());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = std::exp(lambda0[c]) * basis.cell_width();
  const double eps2 = eps * eps;

  MassEstimate est;
  est.draws = draws;
  LogDensityModel model(basis);
  for (std::size_t i = 0; i < draws; ++i) {
    model.Reset(prior.Sample(basis, rng));
    double kl = 0.0, v = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      const double d = lambda0[c] - model.LogDensityOnCell(c);
      kl += w[c] * d;
      v += w[c] * d * d;
    }
    if (kl <= eps2 && v <= eps2) ++est.hits;
  }
  const double n = static_cast<double>(draws);
  est.estimate = static_cast<double>(est.hits) / n;
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
  est.upper95 = est.hits == 0 ? 1.0 - std::pow(0.05, 1.0 / n)
                              : std::min(1.0, est.estimate + 1.6448536269514722 * est.std_error);
  return est;
}

}  // namespace wavedens
