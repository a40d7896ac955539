#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "wavedens/config.hpp"
#include "wavedens/experiments.hpp"
#include "wavedens/suites.hpp"

namespace wavedens::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Bad input other than the config itself, such as a malformed data file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string config_path;
  std::string data_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool no_timing = false;
  int verbose = 0;
  bool quiet = false;
};

class Logger {
 public:
  Logger(std::ostream& out, int level) : out_(out), level_(level) {}
  void Info(const std::string& msg) const {
    if (level_ >= 1) out_ << "wavedens: " << msg << '\n';
  }
  void Debug(const std::string& msg) const {
    if (level_ >= 2) out_ << "wavedens: " << msg << '\n';
  }
  void Error(const std::string& msg) const { out_ << "wavedens: error: " << msg << '\n'; }

 private:
  std::ostream& out_;
  int level_;
};

std::string CsvField(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void WriteErrorCsv(const fs::path& dir, const std::string& kind, const std::string& pointer,
                   const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / "failures.csv");
  if (!f) return;
  f << "error,pointer,message\n" << kind << ',' << CsvField(pointer) << ',' << CsvField(message) << '\n';
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

// Rows that failed go to failures.csv; returns the exit status.
int Report(const fs::path& dir, const std::string& file, const std::vector<CheckRow>& rows,
           const Logger& log) {
  {
    std::ofstream f = OpenOutput(dir / file);
    WriteCheckCsv(f, rows);
  }
  std::vector<CheckRow> failed;
  for (const auto& r : rows) {
    if (!r.pass) failed.push_back(r);
  }
  for (const auto& r : failed) log.Error("check failed: " + r.name + " (" + r.parameters + ")");
  if (failed.empty()) {
    std::error_code ec;
    fs::remove(dir / "failures.csv", ec);
    log.Info(std::to_string(rows.size()) + " checks passed");
    return kOk;
  }
  std::ofstream f = OpenOutput(dir / "failures.csv");
  WriteCheckCsv(f, failed);
  return kAssertionFailure;
}

// The output location is not part of the run's identity.
std::string ConfigHash(const Config& config) {
  nlohmann::json doc = ToJson(config);
  doc.erase("output_dir");
  return Fnv1aHex(doc.dump());
}

void WriteManifest(const fs::path& dir, const Options& o, const Config& config,
                   std::uint64_t seed, double seconds, nlohmann::json extra) {
  nlohmann::json m = {{"schema", "wavedens.manifest/1"},
                      {"command", o.command},
                      {"config_hash", ConfigHash(config)},
                      {"seed", seed},
                      {"wall_clock_seconds", o.no_timing ? 0.0 : seconds}};
  m.update(extra);
  std::ofstream f = OpenOutput(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

int Estimate(const Options& o, const Config& config, const fs::path& dir, const Logger& log) {
  const auto start = Clock::now();
  std::ifstream in(o.data_path);
  if (!in) throw InputError("cannot open data file " + o.data_path);
  Dataset data;
  try {
    data = ReadDataset(in);
  } catch (const std::invalid_argument& e) {
    throw InputError(o.data_path + ": " + e.what());
  }
  const ExperimentConfig& e = config.experiment;
  const std::size_t n = data.size();
  const int jn = e.TruncationLevel(n);
  const WaveletBasis basis(e.BasisFor(n));
  const SpikeSlabPrior prior(e.prior, jn);
  SamplerConfig sampler = e.sampler;
  if (o.seed) sampler.seed = *o.seed;
  log.Info("estimate: n=" + std::to_string(n) + " J_n=" + std::to_string(jn) +
           " resolution=" + std::to_string(basis.resolution()));

  CoeffVector init;
  if (sampler.init == InitMode::kEmpirical) {
    init = EmpiricalInit(basis, prior, data);
  } else if (sampler.init == InitMode::kPriorDraw) {
    Rng rng(sampler.seed ^ 0x9e3779b97f4a7c15ULL);
    init = prior.Sample(basis, rng);
  }
  ChainState state(basis, prior, data, std::move(init));
  RunOptions options;
  options.grid_points = config.estimate.grid_points;
  std::ofstream draws;
  if (config.estimate.write_draws) {
    draws = OpenOutput(dir / "draws.jsonl");
    options.draw_stream = &draws;
  }
  const PosteriorSummary summary = Run(state, sampler, options);

  {
    std::ofstream f = OpenOutput(dir / "band.csv");
    summary.WriteBandCsv(f, true);
  }
  {
    std::ofstream f = OpenOutput(dir / "log_band.csv");
    summary.WriteBandCsv(f, false);
  }
  {
    std::ofstream f = OpenOutput(dir / "inclusion.csv");
    summary.WriteInclusionCsv(f);
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  WriteManifest(dir, o, config, sampler.seed, seconds,
                {{"data_file", o.data_path},
                 {"n", n},
                 {"truncation_level", jn},
                 {"resolution", basis.resolution()},
                 {"draws", summary.draws},
                 {"rw_acceptance", state.counters().rw_rate()},
                 {"toggle_acceptance", state.counters().toggle_rate()}});
  log.Info("estimate: wrote band.csv, log_band.csv, inclusion.csv, manifest.json");
  return kOk;
}

// Row-wise nesting of the posterior balls and finiteness of both fits.
std::vector<CheckRow> RateRows(const ExperimentOutcome& out) {
  std::vector<CheckRow> rows;
  rows.push_back({"rate_slope_finite", "fit=raw", out.raw.slope, std::isfinite(out.raw.slope)});
  rows.push_back({"rate_slope_finite", "fit=log_adjusted", out.log_adjusted.slope,
                  std::isfinite(out.log_adjusted.slope)});
  std::size_t bad = 0;
  for (const auto& r : out.rows) {
    for (int k = 1; k < 4; ++k) {
      if (r.mass[k] < r.mass[k - 1]) ++bad;
    }
  }
  rows.push_back({"mass_nested", "rows=" + std::to_string(out.rows.size()),
                  static_cast<double>(bad), bad == 0});
  return rows;
}

int Simulate(const Options& o, Config config, const fs::path& dir, const Logger& log) {
  const auto start = Clock::now();
  ExperimentConfig& e = config.experiment;
  if (o.seed) e.master_seed = *o.seed;
  if (o.no_timing) e.record_timing = false;
  e.output_dir = dir.string();
  log.Info(o.command + ": " + std::to_string(e.n_grid.size() * e.replicates) + " cells on " +
           std::to_string(o.jobs) + " threads");
  const ExperimentOutcome out = RunExperiment(e, o.jobs);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  WriteManifest(dir, o, config, e.master_seed, seconds,
                {{"cells", out.rows.size()}, {"slope", out.raw.slope},
                 {"slope_log_adjusted", out.log_adjusted.slope}});
  log.Info(o.command + ": slope " + std::to_string(out.raw.slope) + " (target " +
           std::to_string(out.raw.target) + ")");
  if (o.command == "simulate") return kOk;
  return Report(dir, "rate_checks.csv", RateRows(out), log);
}

int CheckTheory(const Options& o, Config config, const fs::path& dir, const Logger& log) {
  if (o.seed) config.theory.seed = *o.seed;
  const auto start = Clock::now();
  const auto rows = RunTheorySuite(config);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  WriteManifest(dir, o, config, config.theory.seed, seconds, {{"checks", rows.size()}});
  return Report(dir, "checks.csv", rows, log);
}

int CheckBasis(const Options& o, const Config& config, const fs::path& dir, const Logger& log) {
  const auto start = Clock::now();
  const auto rows = RunBasisChecks(config);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  WriteManifest(dir, o, config, 0, seconds, {{"checks", rows.size()}});
  return Report(dir, "basis_checks.csv", rows, log);
}

}  // namespace

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

int Main(const std::vector<std::string>& args, std::ostream& log_stream) {
  Options o;
  CLI::App app{"Bayesian wavelet log-density estimation with spike-and-slab priors"};
  app.name(args.empty() ? "wavedens" : args.front());
  app.require_subcommand(1);
  app.add_option("-c,--config", o.config_path, "JSON config (defaults are used when omitted)");
  app.add_option("-o,--out", o.out, "Output directory (overrides output_dir)");
  app.add_option("--seed", o.seed, "Seed override");
  app.add_option("-j,--jobs", o.jobs, "Worker threads for experiment cells")->check(CLI::PositiveNumber);
  app.add_flag("--no-timing", o.no_timing, "Write 0 into wall-clock fields");
  app.add_flag("-v,--verbose", o.verbose, "More logging (repeatable)");
  app.add_flag("-q,--quiet", o.quiet, "Errors only");
  auto* est = app.add_subcommand("estimate", "Posterior band and inclusion probabilities for a data file");
  est->add_option("data", o.data_path, "One sample in [0,1] per line")->required();
  app.add_subcommand("simulate", "Run the simulation grid");
  app.add_subcommand("rates", "Run the simulation grid and check the rate report");
  app.add_subcommand("check-theory", "Numerical checks of the theoretical conditions");
  app.add_subcommand("check-basis", "Orthonormality and Parseval checks of the wavelet basis");
  app.fallthrough();

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    log_stream << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    log_stream << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    log_stream << "wavedens: error: " << e.what() << '\n';
    return kConfigError;
  }
  o.command = app.get_subcommands().front()->get_name();
  const Logger log(log_stream, o.quiet ? 0 : 1 + o.verbose);

  fs::path dir = o.out;
  Config config;
  try {
    config = o.config_path.empty() ? ParseConfig({{"schema", kConfigSchema}}) : LoadConfig(o.config_path);
    if (dir.empty()) dir = config.experiment.output_dir;
  } catch (const ConfigError& e) {
    log.Error(std::string("config ") + e.what());
    if (!dir.empty()) WriteErrorCsv(dir, "config", e.pointer(), e.what());
    return kConfigError;
  }

  try {
    fs::create_directories(dir);
    log.Debug("config hash " + ConfigHash(config) + ", output " + dir.string());
    if (o.command == "estimate") return Estimate(o, config, dir, log);
    if (o.command == "simulate" || o.command == "rates") return Simulate(o, config, dir, log);
    if (o.command == "check-theory") return CheckTheory(o, config, dir, log);
    return CheckBasis(o, config, dir, log);
  } catch (const InputError& e) {
    log.Error(e.what());
    WriteErrorCsv(dir, "input", "", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    log.Error(e.what());
    WriteErrorCsv(dir, "runtime", "", e.what());
    return kRuntimeFailure;
  }
}

}  // namespace wavedens::cli
