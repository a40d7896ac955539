#include "wavedens/suites.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wavedens/experiments.hpp"
#include "wavedens/kernels.hpp"

namespace wavedens {
namespace {

std::string Params(std::initializer_list<std::pair<const char*, double>> kv) {
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

int CoarseLevelFor(int s) {
  if (s == 1) return 0;
  int j = 0;
  while ((1 << j) < 2 * s) ++j;
  return j;
}

double C0For(const Config& config) {
  return config.theory.c0 > 0.0 ? config.theory.c0 : std::max(1.0, config.experiment.truth.tau);
}

// Truth with the configured amplitude on a basis of the given resolution.
TruthSpec TheoryTruth(const Config& config, double beta) {
  TruthSpec t = config.experiment.truth;
  t.beta = beta;
  return t;
}

void ConstraintChecks(const Config& config, std::vector<CheckRow>& rows) {
  const int jn = DefaultTruncationLevel(static_cast<std::size_t>(config.theory.n));
  const SpikeSlabPrior prior(config.experiment.prior, jn);
  const ConstraintReport report = prior.CheckConstraints();
  for (const auto& r : report.rows) rows.push_back({"prior_" + r.name, r.parameters, r.value, r.pass});
}

void RateChecks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const double c0 = C0For(config);
  const int jn = DefaultTruncationLevel(static_cast<std::size_t>(t.n));
  for (double beta : t.betas) {
    const double eps = MinimaxRate(t.n, beta);
    rows.push_back({"minimax_rate", Params({{"n", t.n}, {"beta", beta}}), eps, eps > 0.0 && eps < 1.0});
    const ThresholdProfile p = ThresholdProfile::Make(t.n, beta, c0, t.j0, t.eta, jn);
    const int js = JStar(t.n, beta, c0);
    // Flat part up to J_*, decay part beyond it.
    bool consistent = true;
    for (int j = 0; j <= jn; ++j) {
      const double decay = c0 * std::exp2(-j * (beta + 0.5));
      const double flat = beta > 0.5 ? std::sqrt(std::log(t.n) / t.n) : std::exp2(-0.5 * j) * eps;
      const double expected = j <= js ? flat : decay;
      if (std::fabs(p.at(j) - expected) > 1e-15 * expected) consistent = false;
    }
    rows.push_back({"j_star_regime", Params({{"n", t.n}, {"beta", beta}, {"C0", c0}}),
                    static_cast<double>(js), consistent});
    double sup = 0.0;
    bool monotone = true;
    for (int j = 0; j <= jn; ++j) {
      sup = std::max(sup, p.at(j) * std::exp2(j * (std::min(1.0, beta) + 0.5)));
      if (!(p.at(j) > 0.0)) monotone = false;
      if (j > js && j > 0 && p.at(j) > p.at(j - 1)) monotone = false;
    }
    rows.push_back({"delta_sup_clause", Params({{"n", t.n}, {"beta", beta}, {"C0", c0}}), sup,
                    sup <= c0 * (1.0 + 1e-12) && monotone});
  }
}

void PartitionChecks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const int jn = DefaultTruncationLevel(static_cast<std::size_t>(t.n));
  const ThresholdProfile p = ThresholdProfile::Make(t.n, t.betas.front(), C0For(config), t.j0, t.eta, jn);
  CoeffVector theta0;
  theta0.Set(WaveletIndex::Wavelet(t.j0 + 1, 0), 0.01);
  const PartitionKey same = ClassifyPartition(theta0, theta0, {}, p, t.m);
  rows.push_back({"partition_truth_empty", "", static_cast<double>(same.indices.size()), same.empty()});
  CoeffVector theta = theta0;
  const WaveletIndex idx = WaveletIndex::Wavelet(t.j0 + 1, 1);
  theta.Set(idx, 2.0 * t.m * p.at(idx.j));
  const PartitionKey key = ClassifyPartition(theta, theta0, {}, p, t.m);
  rows.push_back({"partition_single_slice", "excess=2M*delta", static_cast<double>(key.slice.value_or(0)),
                  key.indices.size() == 1 && key.slice == 3});
  CoeffVector low = theta0;
  low.Set(WaveletIndex::Wavelet(t.j0, 0), 1.0);
  rows.push_back({"partition_below_j0", "", 0.0,
                  ClassifyPartition(low, theta0, {}, p, t.m).empty()});
}

void MarginChecks(const Config& config, std::vector<CheckRow>& rows) {
  const TheorySettings& t = config.theory;
  const int jn = DefaultTruncationLevel(static_cast<std::size_t>(t.n));
  const double c0 = C0For(config);
  BasisSpec spec{config.experiment.vanishing_moments, config.experiment.coarse_level,
                 std::max(12, jn + 3)};
  const WaveletBasis basis(spec);
  for (double beta : t.betas) {
    TruthSpec ts = TheoryTruth(config, beta);
    ts.max_level = std::min(ts.max_level, jn);
    const LogDensityModel truth = MakeTruth(ts, basis);
    const ThresholdProfile p = ThresholdProfile::Make(t.n, beta, c0, t.j0, t.eta, jn);
    const double kappa = std::min(1.0, beta);
    Rng rng(t.seed + static_cast<std::uint64_t>(std::llround(beta * 1000.0)));
    int negative = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < t.margin_draws; ++d) {
      const CoeffVector theta = SampleSliceMember(basis, truth.theta(), p, t.m, rng);
      const PartitionKey key =
          ClassifyPartition(theta, truth.theta(), CCoefficients(basis, theta), p, t.m);
      const MarginReport r =
          Assumption1Margin(basis, key, theta, truth.theta(), p, t.m, t.b, t.c, kappa);
      if (r.margin < 0.0) ++negative;
      worst = std::max(worst, r.margin);
    }
    const std::string params = Params({{"beta", beta}, {"n", t.n}, {"B", t.b}, {"C", t.c},
                                       {"J0", static_cast<double>(t.j0)}, {"M", t.m},
                                       {"draws", static_cast<double>(t.margin_draws)}});
    rows.push_back({beta > 0.5 ? "assumption1_margin_high" : "assumption1_margin_low", params,
                    static_cast<double>(negative) / t.margin_draws, negative == t.margin_draws});
    rows.push_back({beta > 0.5 ? "assumption1_worst_margin_high" : "assumption1_worst_margin_low",
                    params, worst, worst < 0.0});
  }
}

}  // namespace

void Lemma2Checks(const Config& config, std::vector<CheckRow>& rows);
void Lemma6Checks(const Config& config, std::vector<CheckRow>& rows);
void KlMassChecks(const Config& config, std::vector<CheckRow>& rows);

std::vector<CheckRow> RunTheorySuite(const Config& config) {
  std::vector<CheckRow> rows;
  const auto& enabled = config.theory.checks;
  auto on = [&](const char* name) {
    return std::find(enabled.begin(), enabled.end(), name) != enabled.end();
  };
  if (on("constraints")) ConstraintChecks(config, rows);
  if (on("rates")) RateChecks(config, rows);
  if (on("partition")) PartitionChecks(config, rows);
  if (on("margin")) MarginChecks(config, rows);
  if (on("lemma2")) Lemma2Checks(config, rows);
  if (on("lemma6")) Lemma6Checks(config, rows);
  if (on("kl_mass")) KlMassChecks(config, rows);
  return rows;
}

std::vector<CheckRow> RunBasisChecks(const Config& config) {
  const BasisCheckSettings& b = config.basis_check;
  std::vector<CheckRow> rows;
  for (int s : b.vanishing_moments) {
    const int j0 = CoarseLevelFor(s);
    const int top = std::max(b.max_level, j0);
    const WaveletBasis basis(BasisSpec{s, j0, std::max(12, top + 4)});
    const auto indices = basis.Enumerate(top);
    const std::size_t cells = basis.cell_count();
    std::vector<std::vector<double>> dense(indices.size(), std::vector<double>(cells, 0.0));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const CellSpan span = basis.Cells(indices[i]);
      std::copy(span.values.begin(), span.values.end(), dense[i].begin() + span.first);
    }
    double off = 0.0, diag = 0.0, mean = 0.0;
    const double w = basis.cell_width();
    for (std::size_t a = 0; a < dense.size(); ++a) {
      for (std::size_t c = a; c < dense.size(); ++c) {
        const double g = kernels::Dot(dense[a], dense[c]) * w;
        if (a == c) {
          diag = std::max(diag, std::fabs(g - 1.0));
        } else {
          off = std::max(off, std::fabs(g));
        }
      }
      if (!indices[a].is_scaling()) mean = std::max(mean, std::fabs(basis.Integral(indices[a])));
    }
    const std::string params = Params({{"S", static_cast<double>(s)},
                                       {"j0", static_cast<double>(j0)},
                                       {"max_level", static_cast<double>(top)}});
    rows.push_back({"basis_gram_offdiag", params, off, off <= b.tolerance});
    rows.push_back({"basis_gram_diag", params, diag, diag <= b.tolerance});
    rows.push_back({"basis_zero_mean", params, mean, mean <= b.tolerance});

    Rng rng(static_cast<std::uint64_t>(1000 + s));
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int d = 0; d < b.parseval_draws; ++d) {
      CoeffVector theta;
      double coeff2 = 0.0;
      for (const auto& idx : indices) {
        const double v = normal(rng) * std::exp2(-0.5 * idx.j);
        theta.Set(idx, v);
        coeff2 += v * v;
      }
      std::vector<double> f(cells, 0.0);
      basis.SynthesizeCells(theta, f);
      const double func2 = kernels::Dot(f, f) * w;
      worst = std::max(worst, std::fabs(func2 - coeff2) / coeff2);
    }
    rows.push_back({"basis_parseval", params + ";draws=" + std::to_string(b.parseval_draws), worst,
                    worst <= b.tolerance});
  }
  return rows;
}

void WriteCheckCsv(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << "check,parameters,value,pass\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.name << ",\"" << r.parameters << "\"," << r.value << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

bool AllPass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

}  // namespace wavedens
