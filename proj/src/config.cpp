#include "wavedens/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wavedens {
namespace {

using nlohmann::json;

std::string Escape(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') {
      out += "~0";
    } else if (ch == '/') {
      out += "~1";
    } else {
      out += ch;
    }
  }
  return out;
}

double Number(const json& v, const std::string& ptr, double lo, double hi, bool open_lo = false) {
  if (!v.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
    std::ostringstream msg;
    msg << "value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    throw ConfigError(ptr, msg.str());
  }
  return x;
}

long long Integer(const json& v, const std::string& ptr, long long lo, long long hi) {
  if (!v.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError(ptr, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "]");
  }
  return x;
}

std::uint64_t Seed(const json& v, const std::string& ptr) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(ptr, "expected a non-negative integer seed");
  }
  return v.get<std::uint64_t>();
}

bool Bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) throw ConfigError(ptr, "expected true or false");
  return v.get<bool>();
}

std::string String(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError(ptr, "expected a string");
  return v.get<std::string>();
}

const json& Array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError(ptr, "expected an array");
  return v;
}

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Object {
 public:
  Object(const json& doc, std::string ptr) : doc_(doc), ptr_(std::move(ptr)) {
    if (!doc_.is_object()) throw ConfigError(ptr_, "expected an object");
  }

  template <typename F>
  void Read(const char* key, F&& handle) {
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    seen_.insert(key);
    handle(*it, Path(key));
  }

  std::string Path(const std::string& key) const { return ptr_ + "/" + Escape(key); }

  void Finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(Path(item.key()), "unknown key");
    }
  }

 private:
  const json& doc_;
  std::string ptr_;
  std::set<std::string> seen_;
};

InitMode InitFromString(const std::string& s, const std::string& ptr) {
  if (s == "empty") return InitMode::kEmpty;
  if (s == "empirical") return InitMode::kEmpirical;
  if (s == "prior_draw") return InitMode::kPriorDraw;
  throw ConfigError(ptr, "unknown init mode '" + s + "' (empty, empirical, prior_draw)");
}

std::string InitToString(InitMode m) {
  switch (m) {
    case InitMode::kEmpty:
      return "empty";
    case InitMode::kEmpirical:
      return "empirical";
    case InitMode::kPriorDraw:
      return "prior_draw";
  }
  return "empirical";
}

std::vector<double> Numbers(const json& v, const std::string& ptr, double lo, double hi) {
  std::vector<double> out;
  for (std::size_t i = 0; i < Array(v, ptr).size(); ++i) {
    out.push_back(Number(v[i], ptr + "/" + std::to_string(i), lo, hi));
  }
  return out;
}

void ParseBasis(const json& doc, const std::string& ptr, ExperimentConfig& e) {
  Object o(doc, ptr);
  o.Read("vanishing_moments", [&](const json& v, const std::string& p) {
    e.vanishing_moments = static_cast<int>(Integer(v, p, 1, 4));
  });
  o.Read("coarse_level", [&](const json& v, const std::string& p) {
    e.coarse_level = static_cast<int>(Integer(v, p, 0, 20));
  });
  o.Read("eval_resolution", [&](const json& v, const std::string& p) {
    e.eval_resolution = static_cast<int>(Integer(v, p, 0, 24));
  });
  o.Finish();
}

void ParsePrior(const json& doc, const std::string& ptr, PriorSpec& prior) {
  Object o(doc, ptr);
  constexpr double kBig = std::numeric_limits<double>::max();
  o.Read("beta0", [&](const json& v, const std::string& p) { prior.beta0 = Number(v, p, 0.0, kBig, true); });
  o.Read("a1", [&](const json& v, const std::string& p) { prior.a1 = Number(v, p, 0.0, 1.0, true); });
  o.Read("b1", [&](const json& v, const std::string& p) { prior.b1 = Number(v, p, 0.0, kBig); });
  o.Read("mu_star", [&](const json& v, const std::string& p) { prior.mu_star = Number(v, p, 0.0, kBig); });
  o.Read("slab_family", [&](const json& v, const std::string& p) {
    try {
      prior.slab_family = SlabFamilyFromString(String(v, p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p, e.what());
    }
  });
  o.Read("Jn_rule", [&](const json& v, const std::string& p) {
    if (v.is_string()) {
      if (v.get<std::string>() != "ceil_log2_n") {
        throw ConfigError(p, "expected \"ceil_log2_n\" or a fixed integer level");
      }
      prior.truncation_level = -1;
    } else {
      prior.truncation_level = static_cast<int>(Integer(v, p, 0, 23));
    }
  });
  o.Read("omega", [&](const json& v, const std::string& p) {
    prior.omega_explicit = Numbers(v, p, 0.0, 1.0);
    prior.omega_rule = OmegaRule::kExplicit;
  });
  o.Read("custom_table", [&](const json& v, const std::string& p) {
    Object t(v, p);
    t.Read("knots", [&](const json& k, const std::string& kp) {
      prior.custom_knots = Numbers(k, kp, -1e6, 1e6);
    });
    t.Read("values", [&](const json& k, const std::string& kp) {
      prior.custom_values = Numbers(k, kp, 0.0, 1e12);
    });
    t.Finish();
  });
  o.Read("scaling_always_active", [&](const json& v, const std::string& p) {
    prior.scaling_always_active = Bool(v, p);
  });
  o.Read("slab_normalizer", [&](const json& v, const std::string& p) {
    const double z = Number(v, p, 0.0, 10.0);
    if (std::fabs(z - SlabDensity::DoubleExponentialNormalizer()) > 1e-12) {
      throw ConfigError(p, "slab normalizer does not match the built-in value");
    }
  });
  o.Finish();
  if (prior.slab_family == SlabFamily::kCustomTable) {
    try {
      SlabDensity::CustomTable(prior.custom_knots, prior.custom_values);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(o.Path("custom_table"), e.what());
    }
  }
}

void ParseSampler(const json& doc, const std::string& ptr, SamplerConfig& s) {
  Object o(doc, ptr);
  o.Read("sweeps", [&](const json& v, const std::string& p) { s.sweeps = static_cast<int>(Integer(v, p, 1, 100000000)); });
  o.Read("burn_in", [&](const json& v, const std::string& p) { s.burn_in = static_cast<int>(Integer(v, p, 0, 100000000)); });
  o.Read("thin", [&](const json& v, const std::string& p) { s.thin = static_cast<int>(Integer(v, p, 1, 1000000)); });
  o.Read("rw_step", [&](const json& v, const std::string& p) { s.rw_step = Number(v, p, 0.0, 1e6, true); });
  o.Read("toggle_attempts_per_sweep", [&](const json& v, const std::string& p) {
    s.toggle_attempts_per_sweep = static_cast<int>(Integer(v, p, 0, 10000000));
  });
  o.Read("seed", [&](const json& v, const std::string& p) { s.seed = Seed(v, p); });
  o.Read("adapt_during_burn_in", [&](const json& v, const std::string& p) { s.adapt_during_burn_in = Bool(v, p); });
  o.Read("init", [&](const json& v, const std::string& p) { s.init = InitFromString(String(v, p), p); });
  o.Read("spot_check_every", [&](const json& v, const std::string& p) {
    s.spot_check_every = static_cast<int>(Integer(v, p, 0, 100000000));
  });
  o.Finish();
  try {
    s.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ptr, e.what());
  }
}

void ParseTruth(const json& doc, const std::string& ptr, TruthSpec& t) {
  Object o(doc, ptr);
  o.Read("beta", [&](const json& v, const std::string& p) { t.beta = Number(v, p, 0.0, 100.0, true); });
  o.Read("tau", [&](const json& v, const std::string& p) { t.tau = Number(v, p, 0.0, 100.0); });
  o.Read("max_level", [&](const json& v, const std::string& p) { t.max_level = static_cast<int>(Integer(v, p, 0, 22)); });
  o.Read("sign_seed", [&](const json& v, const std::string& p) { t.sign_seed = Seed(v, p); });
  o.Read("construction", [&](const json& v, const std::string& p) {
    const std::string s = String(v, p);
    if (s == "random_signs") {
      t.construction = TruthConstruction::kRandomSigns;
    } else if (s == "explicit_table") {
      t.construction = TruthConstruction::kExplicitTable;
    } else {
      throw ConfigError(p, "unknown construction '" + s + "' (random_signs, explicit_table)");
    }
  });
  o.Read("table", [&](const json& v, const std::string& p) {
    try {
      t.table = CoeffVector::FromJson(v);
    } catch (const std::exception& e) {
      throw ConfigError(p, e.what());
    }
  });
  o.Finish();
}

void ParseExperiment(const json& doc, const std::string& ptr, ExperimentConfig& e) {
  Object o(doc, ptr);
  o.Read("n_grid", [&](const json& v, const std::string& p) {
    e.n_grid.clear();
    for (std::size_t i = 0; i < Array(v, p).size(); ++i) {
      const std::string ip = p + "/" + std::to_string(i);
      e.n_grid.push_back(static_cast<std::size_t>(Integer(v[i], ip, 2, 100000000)));
      if (i > 0 && e.n_grid[i] <= e.n_grid[i - 1]) throw ConfigError(ip, "n_grid must be strictly increasing");
    }
    if (e.n_grid.empty()) throw ConfigError(p, "n_grid is empty");
  });
  o.Read("replicates", [&](const json& v, const std::string& p) { e.replicates = static_cast<int>(Integer(v, p, 3, 100000)); });
  o.Read("master_seed", [&](const json& v, const std::string& p) { e.master_seed = Seed(v, p); });
  o.Read("band_points", [&](const json& v, const std::string& p) {
    e.band_points = static_cast<std::size_t>(Integer(v, p, 2, 10000000));
  });
  o.Read("partition", [&](const json& v, const std::string& p) {
    Object q(v, p);
    q.Read("M", [&](const json& x, const std::string& xp) { e.partition_m = Number(x, xp, 0.0, 1e6, true); });
    q.Read("J0", [&](const json& x, const std::string& xp) { e.partition_j0 = static_cast<int>(Integer(x, xp, 0, 22)); });
    q.Read("eta", [&](const json& x, const std::string& xp) { e.partition_eta = Number(x, xp, 0.0, 1e6, true); });
    q.Finish();
  });
  o.Read("record_timing", [&](const json& v, const std::string& p) { e.record_timing = Bool(v, p); });
  o.Finish();
}

void ParseEstimate(const json& doc, const std::string& ptr, EstimateSettings& s) {
  Object o(doc, ptr);
  o.Read("grid_points", [&](const json& v, const std::string& p) {
    s.grid_points = static_cast<std::size_t>(Integer(v, p, 2, 10000000));
  });
  o.Read("write_draws", [&](const json& v, const std::string& p) { s.write_draws = Bool(v, p); });
  o.Finish();
}

void ParseTheory(const json& doc, const std::string& ptr, TheorySettings& t) {
  Object o(doc, ptr);
  o.Read("betas", [&](const json& v, const std::string& p) {
    t.betas = Numbers(v, p, 1e-6, 100.0);
    if (t.betas.empty()) throw ConfigError(p, "need at least one beta");
  });
  o.Read("n", [&](const json& v, const std::string& p) { t.n = Number(v, p, 3.0, 1e12); });
  o.Read("C0", [&](const json& v, const std::string& p) { t.c0 = Number(v, p, 0.0, 1e6); });
  o.Read("J0", [&](const json& v, const std::string& p) { t.j0 = static_cast<int>(Integer(v, p, 0, 20)); });
  o.Read("eta", [&](const json& v, const std::string& p) { t.eta = Number(v, p, 0.0, 1e6, true); });
  o.Read("M", [&](const json& v, const std::string& p) { t.m = Number(v, p, 0.0, 1e6, true); });
  o.Read("B", [&](const json& v, const std::string& p) { t.b = Number(v, p, 0.0, 1e6, true); });
  o.Read("C", [&](const json& v, const std::string& p) { t.c = Number(v, p, 0.0, 1e12); });
  o.Read("margin_draws", [&](const json& v, const std::string& p) { t.margin_draws = static_cast<int>(Integer(v, p, 1, 10000000)); });
  o.Read("lemma2", [&](const json& v, const std::string& p) {
    Object q(v, p);
    q.Read("B", [&](const json& x, const std::string& xp) { t.lemma2_b = Number(x, xp, 0.0, 1.0, true); });
    q.Read("draws", [&](const json& x, const std::string& xp) { t.lemma2_draws = static_cast<int>(Integer(x, xp, 1, 10000000)); });
    q.Read("n", [&](const json& x, const std::string& xp) { t.lemma2_n = static_cast<std::size_t>(Integer(x, xp, 1, 100000000)); });
    q.Read("envelope", [&](const json& x, const std::string& xp) { t.lemma2_envelope = Number(x, xp, 0.0, 1e6, true); });
    q.Finish();
  });
  o.Read("lemma6", [&](const json& v, const std::string& p) {
    Object q(v, p);
    q.Read("draws", [&](const json& x, const std::string& xp) { t.lemma6_draws = static_cast<int>(Integer(x, xp, 1, 10000000)); });
    q.Read("J0", [&](const json& x, const std::string& xp) {
      t.lemma6_j0.clear();
      for (std::size_t i = 0; i < Array(x, xp).size(); ++i) {
        t.lemma6_j0.push_back(static_cast<int>(Integer(x[i], xp + "/" + std::to_string(i), 0, 20)));
      }
    });
    q.Finish();
  });
  o.Read("kl_mass", [&](const json& v, const std::string& p) {
    Object q(v, p);
    q.Read("draws", [&](const json& x, const std::string& xp) { t.kl_draws = static_cast<std::size_t>(Integer(x, xp, 1, 100000000)); });
    q.Read("eps2", [&](const json& x, const std::string& xp) { t.kl_eps2 = Number(x, xp, 0.0, 1e6, true); });
    q.Read("levels", [&](const json& x, const std::string& xp) { t.kl_levels = static_cast<int>(Integer(x, xp, 0, 12)); });
    q.Finish();
  });
  o.Read("seed", [&](const json& v, const std::string& p) { t.seed = Seed(v, p); });
  o.Read("checks", [&](const json& v, const std::string& p) {
    static const std::set<std::string> known{"constraints", "rates", "partition", "margin",
                                             "lemma2",      "lemma6", "kl_mass"};
    t.checks.clear();
    for (std::size_t i = 0; i < Array(v, p).size(); ++i) {
      const std::string ip = p + "/" + std::to_string(i);
      const std::string name = String(v[i], ip);
      if (!known.count(name)) throw ConfigError(ip, "unknown check '" + name + "'");
      t.checks.push_back(name);
    }
  });
  o.Finish();
}

void ParseBasisCheck(const json& doc, const std::string& ptr, BasisCheckSettings& b) {
  Object o(doc, ptr);
  o.Read("vanishing_moments", [&](const json& v, const std::string& p) {
    b.vanishing_moments.clear();
    for (std::size_t i = 0; i < Array(v, p).size(); ++i) {
      b.vanishing_moments.push_back(static_cast<int>(Integer(v[i], p + "/" + std::to_string(i), 1, 4)));
    }
  });
  o.Read("max_level", [&](const json& v, const std::string& p) { b.max_level = static_cast<int>(Integer(v, p, 0, 14)); });
  o.Read("parseval_draws", [&](const json& v, const std::string& p) {
    b.parseval_draws = static_cast<int>(Integer(v, p, 0, 1000000));
  });
  o.Read("tolerance", [&](const json& v, const std::string& p) { b.tolerance = Number(v, p, 0.0, 1.0, true); });
  o.Finish();
}

}  // namespace

ConfigError::ConfigError(std::string pointer, const std::string& message)
    : std::runtime_error((pointer.empty() ? std::string("(document)") : pointer) + ": " + message),
      pointer_(std::move(pointer)) {}

Config ParseConfig(const json& doc) {
  Config cfg;
  Object o(doc, "");
  bool versioned = false;
  o.Read("schema", [&](const json& v, const std::string& p) {
    if (String(v, p) != kConfigSchema) {
      throw ConfigError(p, "unsupported schema '" + v.get<std::string>() + "' (expected " +
                               kConfigSchema + ")");
    }
    versioned = true;
  });
  if (!versioned) throw ConfigError("/schema", std::string("missing schema version ") + kConfigSchema);
  o.Read("output_dir", [&](const json& v, const std::string& p) { cfg.experiment.output_dir = String(v, p); });
  o.Read("basis", [&](const json& v, const std::string& p) { ParseBasis(v, p, cfg.experiment); });
  o.Read("prior", [&](const json& v, const std::string& p) { ParsePrior(v, p, cfg.experiment.prior); });
  o.Read("sampler", [&](const json& v, const std::string& p) { ParseSampler(v, p, cfg.experiment.sampler); });
  o.Read("truth", [&](const json& v, const std::string& p) { ParseTruth(v, p, cfg.experiment.truth); });
  o.Read("experiment", [&](const json& v, const std::string& p) { ParseExperiment(v, p, cfg.experiment); });
  o.Read("estimate", [&](const json& v, const std::string& p) { ParseEstimate(v, p, cfg.estimate); });
  o.Read("theory", [&](const json& v, const std::string& p) { ParseTheory(v, p, cfg.theory); });
  o.Read("basis_check", [&](const json& v, const std::string& p) { ParseBasisCheck(v, p, cfg.basis_check); });
  o.Finish();

  try {
    BasisSpec{cfg.experiment.vanishing_moments, cfg.experiment.coarse_level, 12}.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/basis", e.what());
  }
  if (cfg.experiment.truth.max_level < cfg.experiment.coarse_level) {
    throw ConfigError("/truth/max_level", "must be >= the coarse level");
  }
  try {
    cfg.experiment.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/experiment", e.what());
  }
  return cfg;
}

Config LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return ParseConfig(doc);
}

json ToJson(const Config& c) {
  const ExperimentConfig& e = c.experiment;
  json prior = {{"beta0", e.prior.beta0},
                {"a1", e.prior.a1},
                {"b1", e.prior.b1},
                {"mu_star", e.prior.mu_star},
                {"slab_family", ToString(e.prior.slab_family)},
                {"scaling_always_active", e.prior.scaling_always_active},
                {"slab_normalizer", SlabDensity::DoubleExponentialNormalizer()}};
  if (e.prior.truncation_level < 0) {
    prior["Jn_rule"] = "ceil_log2_n";
  } else {
    prior["Jn_rule"] = e.prior.truncation_level;
  }
  if (e.prior.omega_rule == OmegaRule::kExplicit) prior["omega"] = e.prior.omega_explicit;
  if (e.prior.slab_family == SlabFamily::kCustomTable) {
    prior["custom_table"] = {{"knots", e.prior.custom_knots}, {"values", e.prior.custom_values}};
  }
  json truth = {{"beta", e.truth.beta},
                {"tau", e.truth.tau},
                {"max_level", e.truth.max_level},
                {"sign_seed", e.truth.sign_seed},
                {"construction", e.truth.construction == TruthConstruction::kRandomSigns
                                     ? "random_signs"
                                     : "explicit_table"}};
  if (e.truth.construction == TruthConstruction::kExplicitTable) {
    truth["table"] = e.truth.table.ToJson(e.coarse_level, e.vanishing_moments);
  }
  const TheorySettings& t = c.theory;
  return {
      {"schema", kConfigSchema},
      {"output_dir", e.output_dir},
      {"basis",
       {{"vanishing_moments", e.vanishing_moments},
        {"coarse_level", e.coarse_level},
        {"eval_resolution", e.eval_resolution}}},
      {"prior", prior},
      {"sampler",
       {{"sweeps", e.sampler.sweeps},
        {"burn_in", e.sampler.burn_in},
        {"thin", e.sampler.thin},
        {"rw_step", e.sampler.rw_step},
        {"toggle_attempts_per_sweep", e.sampler.toggle_attempts_per_sweep},
        {"seed", e.sampler.seed},
        {"adapt_during_burn_in", e.sampler.adapt_during_burn_in},
        {"init", InitToString(e.sampler.init)},
        {"spot_check_every", e.sampler.spot_check_every}}},
      {"truth", truth},
      {"experiment",
       {{"n_grid", e.n_grid},
        {"replicates", e.replicates},
        {"master_seed", e.master_seed},
        {"band_points", e.band_points},
        {"partition", {{"M", e.partition_m}, {"J0", e.partition_j0}, {"eta", e.partition_eta}}},
        {"record_timing", e.record_timing}}},
      {"estimate", {{"grid_points", c.estimate.grid_points}, {"write_draws", c.estimate.write_draws}}},
      {"theory",
       {{"betas", t.betas},
        {"n", t.n},
        {"C0", t.c0},
        {"J0", t.j0},
        {"eta", t.eta},
        {"M", t.m},
        {"B", t.b},
        {"C", t.c},
        {"margin_draws", t.margin_draws},
        {"lemma2",
         {{"B", t.lemma2_b}, {"draws", t.lemma2_draws}, {"n", t.lemma2_n}, {"envelope", t.lemma2_envelope}}},
        {"lemma6", {{"draws", t.lemma6_draws}, {"J0", t.lemma6_j0}}},
        {"kl_mass", {{"draws", t.kl_draws}, {"eps2", t.kl_eps2}, {"levels", t.kl_levels}}},
        {"seed", t.seed},
        {"checks", t.checks}}},
      {"basis_check",
       {{"vanishing_moments", c.basis_check.vanishing_moments},
        {"max_level", c.basis_check.max_level},
        {"parseval_draws", c.basis_check.parseval_draws},
        {"tolerance", c.basis_check.tolerance}}},
  };
}

}  // namespace wavedens
