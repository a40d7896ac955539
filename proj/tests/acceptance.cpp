// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--only 1,5,9] [--jobs N]
//
// Rate experiments read configs/rates_beta*.json and write under
// ./acceptance_out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "cli.hpp"
#include "micro_instance.hpp"
#include "wavedens/config.hpp"
#include "wavedens/metrics.hpp"
#include "wavedens/suites.hpp"

namespace wavedens {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

const CheckRow* FindRow(const std::vector<CheckRow>& rows, const std::string& name) {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

Config Defaults() { return ParseConfig({{"schema", kConfigSchema}}); }

CoeffVector RandomSparse(const WaveletBasis& basis, std::mt19937_64& rng, int max_level) {
  std::bernoulli_distribution keep(0.3);
  std::normal_distribution<double> normal(0.0, 1.0);
  CoeffVector theta;
  for (const auto& idx : basis.Enumerate(max_level)) {
    if (keep(rng)) theta.Set(idx, normal(rng) * std::exp2(-0.75 * idx.j));
  }
  return theta;
}

Outcome BasisSoundness() {
  const std::vector<CheckRow> rows = RunBasisChecks(Defaults());
  double gram = 0.0, parseval = 0.0;
  for (const auto& r : rows) {
    if (r.name == "basis_gram_offdiag" || r.name == "basis_gram_diag") gram = std::max(gram, r.value);
    if (r.name == "basis_parseval") parseval = std::max(parseval, r.value);
  }
  return {AllPass(rows), "S=1..4 to level 6: gram " + Fmt(gram) + ", parseval " + Fmt(parseval) + " (tol 1e-7)"};
}

Outcome Normalization() {
  const WaveletBasis basis(BasisSpec{2, 2, 12});
  std::mt19937_64 rng(101);
  double mass_err = 0.0;
  bool c_on_scaling = true;
  for (int d = 0; d < 100; ++d) {
    const LogDensityModel model(basis, RandomSparse(basis, rng, 7));
    double total = 0.0;
    for (double l : model.LogDensityCells()) total += std::exp(l) * basis.cell_width();
    mass_err = std::max(mass_err, std::fabs(total - 1.0));
    for (const auto& [idx, v] : model.c_coefficients()) c_on_scaling = c_on_scaling && idx.is_scaling();
  }
  double c_truth = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    TruthSpec spec;
    spec.sign_seed = static_cast<std::uint64_t>(seed);
    spec.beta = 0.5 + 0.25 * (seed % 5);
    const LogDensityModel truth = MakeTruth(spec, basis);
    for (const auto& [idx, v] : truth.c_coefficients()) c_truth = std::max(c_truth, std::fabs(v));
  }
  return {mass_err <= 1e-8 && c_on_scaling && c_truth <= 1e-8,
          "integral err " + Fmt(mass_err) + ", c on scaling only " + (c_on_scaling ? "yes" : "no") +
              ", max |c(theta0)| " + Fmt(c_truth) + " (tol 1e-8)"};
}

Outcome HaarOracle() {
  const WaveletBasis haar(BasisSpec{1, 0, 10});
  CoeffVector theta;
  theta.Set(WaveletIndex::Wavelet(0, 0), 1.0);
  const LogDensityModel model(haar, theta);
  const double lc = std::log(std::cosh(1.0));
  auto uniform = [](double) { return 1.0; };
  auto p = [&](double x) { return model.DensityAt(x); };
  const double z_err = std::fabs(model.log_partition() - lc);
  const double kl_err = std::fabs(KullbackLeibler(uniform, p) - lc);
  const double h = Hellinger(uniform, p);
  const double h_err = std::fabs(h * h - (2.0 - 2.0 * std::cosh(0.5) / std::sqrt(std::cosh(1.0))));
  return {z_err <= 1e-10 && kl_err <= 1e-8 && h_err <= 1e-8,
          "logZ err " + Fmt(z_err) + " (1e-10), KL err " + Fmt(kl_err) + " (1e-8), H2 err " + Fmt(h_err) +
              " (1e-8)"};
}

Outcome Coherence() {
  const WaveletBasis basis(BasisSpec{2, 2, 12});
  std::mt19937_64 rng(202);
  LogDensityModel model(basis, RandomSparse(basis, rng, 6));
  std::uniform_int_distribution<int> level(basis.coarse_level(), 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution commit(0.6), kill(0.2);
  for (int step = 0; step < 10000; ++step) {
    const int j = level(rng);
    std::uniform_int_distribution<int> pos(0, (1 << j) - 1);
    const WaveletIndex idx = WaveletIndex::Wavelet(j, pos(rng));
    model.Propose(idx, kill(rng) ? 0.0 : model.theta().Get(idx) + 0.3 * normal(rng) * std::exp2(-0.5 * j));
    if (commit(rng)) model.Commit();
  }
  const double z_err = std::fabs(model.log_partition() - LogPartition(basis, model.theta()));

  TruthSpec ts;
  const LogDensityModel truth = MakeTruth(ts, basis);
  Rng data_rng(203);
  const Dataset data = SampleData(truth, 4000, data_rng);
  const SpikeSlabPrior prior(PriorSpec{}, 8);
  ChainState state(basis, prior, data);
  SamplerConfig config;
  config.toggle_attempts_per_sweep = 20;
  Rng rng2(204);
  std::uint64_t moves = 0;
  while (moves < 10000) {
    state.Sweep(rng2, config);
    moves = state.counters().rw_attempts + state.counters().birth_attempts + state.counters().death_attempts;
  }
  const double ll_err = std::fabs(state.log_likelihood() - state.RecomputeLogLikelihood());
  return {z_err <= 1e-8 && ll_err <= 1e-8,
          "logZ drift " + Fmt(z_err) + ", log-likelihood drift " + Fmt(ll_err) + " after " +
              std::to_string(moves) + " chain moves (tol 1e-8)"};
}

Outcome MicroPosterior() {
  const testing::MicroInstance m;
  const EnumerationResult exact = EnumeratePosterior(m.data, m.basis, m.prior, m.indices, m.Grids());
  const auto chain = testing::RunMicroChain(m, 150000, 5);
  double worst_inc = 0.0, worst_mean = 0.0;
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    worst_inc = std::max(worst_inc, std::fabs(chain.inclusion[i] - exact.inclusion[i]));
    if (exact.inclusion[i] > 0.1) {
      worst_mean = std::max(worst_mean, std::fabs(chain.mean_given_active[i] - exact.mean_given_active[i]));
    }
  }
  return {worst_inc <= 0.02 && worst_mean <= 0.02,
          "max inclusion diff " + Fmt(worst_inc) + ", max active-mean diff " + Fmt(worst_mean) + " (tol 0.02)"};
}

Outcome PriorRecovery() {
  const WaveletBasis basis(BasisSpec{1, 0, 10});
  const SpikeSlabPrior prior(PriorSpec{}, 3);
  const Dataset none;
  ChainState state(basis, prior, none);
  SamplerConfig config;
  config.toggle_attempts_per_sweep = 16;
  Rng rng(31);
  std::vector<double> active(4, 0.0);
  const int draws = 20000, thin = 25;
  for (int d = 0; d < draws * thin; ++d) {
    state.Sweep(rng, config);
    if (d % thin) continue;
    for (const auto& [idx, v] : state.theta()) {
      if (!idx.is_scaling()) active[idx.j] += 1.0;
    }
  }
  bool pass = true;
  double worst = 0.0;
  for (int j = 0; j <= 3; ++j) {
    const double trials = static_cast<double>(draws) * std::exp2(j);
    const double p = prior.omega(j);
    const double z = std::fabs(active[j] / trials - p) / std::sqrt(p * (1.0 - p) / trials);
    worst = std::max(worst, z);
    pass = pass && z <= 3.0;
  }
  return {pass, "levels 0..3, worst |z| " + Fmt(worst) + " (tol 3 SE)"};
}

Outcome TheoryRows(const std::string& check, const std::vector<std::string>& names) {
  Config config = Defaults();
  config.theory.checks = {check};
  const std::vector<CheckRow> rows = RunTheorySuite(config);
  Outcome o{true, ""};
  for (const auto& name : names) {
    const CheckRow* r = FindRow(rows, name);
    o.pass = o.pass && r && r->pass;
    o.detail += (o.detail.empty() ? "" : ", ") + name + " " + (r ? Fmt(r->value) : "missing");
  }
  return o;
}

struct RateRun {
  ExperimentOutcome outcome;
  std::vector<double> mean_m8;  // per n, across replicates
};

RateRun RunRates(const std::string& name, unsigned jobs) {
  Config config = LoadConfig(fs::path(WAVEDENS_SOURCE_DIR) / "configs" / (name + ".json"));
  config.experiment.output_dir = (fs::path("acceptance_out") / name).string();
  RateRun run{RunExperiment(config.experiment, jobs), {}};
  std::map<std::size_t, std::pair<double, int>> m8;
  for (const auto& r : run.outcome.rows) {
    m8[r.n].first += r.mass[3];
    m8[r.n].second += 1;
  }
  for (const auto& [n, acc] : m8) run.mean_m8.push_back(acc.first / acc.second);
  return run;
}

bool Nondecreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

std::string Masses(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + Fmt(x);
  return "[" + s + "]";
}

Outcome ContractionSlopes(unsigned jobs) {
  const RateRun one = RunRates("rates_beta1", jobs);
  const RateRun two = RunRates("rates_beta2", jobs);
  const double s1 = one.outcome.raw.slope, s2 = two.outcome.raw.slope;
  const bool slopes = std::fabs(s1 - 1.0 / 3.0) <= 0.15 && std::fabs(s2 - 0.4) <= 0.15;
  const bool masses = Nondecreasing(one.mean_m8) && one.mean_m8.back() >= 0.9 &&
                      Nondecreasing(two.mean_m8) && two.mean_m8.back() >= 0.9;
  return {slopes && masses, "beta=1 slope " + Fmt(s1) + " (1/3 +- 0.15), beta=2 slope " + Fmt(s2) +
                                " (2/5 +- 0.15), mean M8 mass beta=1 " + Masses(one.mean_m8) + ", beta=2 " +
                                Masses(two.mean_m8) + " (nondecreasing, last >= 0.9)"};
}

Outcome LowSmoothness(unsigned jobs) {
  const RateRun half = RunRates("rates_beta05", jobs);
  const double s = half.outcome.log_adjusted.slope;
  return {std::fabs(s - 0.25) <= 0.2,
          "beta=0.5 log-adjusted slope " + Fmt(s) + " (1/4 +- 0.2), raw " + Fmt(half.outcome.raw.slope)};
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

Outcome CliDeterminism(unsigned jobs) {
  const fs::path work = fs::absolute("acceptance_out") / "cli";
  fs::remove_all(work);
  fs::create_directories(work);
  const json cfg = {
      {"schema", kConfigSchema},
      {"sampler", {{"sweeps", 150}, {"burn_in", 50}, {"toggle_attempts_per_sweep", 10}}},
      {"experiment", {{"n_grid", {100, 200, 400, 800}}, {"replicates", 3}, {"band_points", 65}}},
      {"estimate", {{"grid_points", 257}, {"write_draws", true}}},
      {"theory", {{"margin_draws", 50}, {"lemma2", {{"draws", 20}}}, {"lemma6", {{"draws", 50}}},
                  {"kl_mass", {{"draws", 2000}}}}},
      {"basis_check", {{"vanishing_moments", {1, 2}}, {"max_level", 5}, {"parseval_draws", 10}}}};
  std::ofstream(work / "config.json") << cfg.dump(2);
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ofstream data(work / "data.txt");
    data.precision(17);
    for (int i = 0; i < 300; ++i) data << std::max(u(rng), u(rng)) << '\n';
  }
  const std::vector<std::vector<std::string>> commands{
      {"check-basis"}, {"check-theory"}, {"estimate", (work / "data.txt").string()}, {"simulate"}, {"rates"}};
  std::string detail;
  bool pass = true;
  for (const auto& command : commands) {
    int codes[2];
    std::map<std::string, std::string> outputs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = work / command.front() / (k ? "b" : "a");
      std::vector<std::string> args{"wavedens", "-c", (work / "config.json").string(), "-o", out.string(),
                                    "--seed", "7", "--no-timing", "-j", std::to_string(k ? jobs : 1)};
      args.insert(args.end(), command.begin(), command.end());
      std::ostringstream log;
      codes[k] = cli::Main(args, log);
      outputs[k] = Snapshot(out);
    }
    const bool same = codes[0] == codes[1] && codes[0] != cli::kRuntimeFailure &&
                      codes[0] != cli::kConfigError && !outputs[0].empty() && outputs[0] == outputs[1];
    pass = pass && same;
    detail += (detail.empty() ? "" : ", ") + command.front() + (same ? " identical" : " DIFFERS") + " (" +
              std::to_string(outputs[0].size()) + " files, exit " + std::to_string(codes[0]) + ")";
  }
  return {pass, detail};
}

}  // namespace
}  // namespace wavedens

int main(int argc, char** argv) {
  using namespace wavedens;
  std::set<int> only;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream s(argv[++i]);
      for (std::string id; std::getline(s, id, ',');) only.insert(std::stoi(id));
    } else if (a == "--jobs" && i + 1 < argc) {
      jobs = static_cast<unsigned>(std::max(1, std::stoi(argv[++i])));
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--jobs N]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"basis soundness", BasisSoundness},
      {"normalization", Normalization},
      {"Haar closed forms", HaarOracle},
      {"incremental coherence", Coherence},
      {"micro-instance posterior", MicroPosterior},
      {"prior recovery", PriorRecovery},
      {"Lemma 2 residual",
       [] { return TheoryRows("lemma2", {"lemma2_zero_g", "lemma2_envelope"}); }},
      {"Assumption 1 margin",
       [] { return TheoryRows("margin", {"assumption1_margin_high", "assumption1_margin_low"}); }},
      {"contraction slopes", [jobs] { return ContractionSlopes(jobs); }},
      {"low-smoothness slope", [jobs] { return LowSmoothness(jobs); }},
      {"CLI determinism", [jobs] { return CliDeterminism(jobs); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": " << o.detail
              << " [" << static_cast<long>(secs) << " s]" << std::endl;
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all passed")
            << std::endl;
  return failed ? 1 : 0;
}
