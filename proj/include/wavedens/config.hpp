#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavedens/experiments.hpp"

namespace wavedens {

inline constexpr const char* kConfigSchema = "wavedens.config/1";

// A schema violation; pointer() is the RFC 6901 path of the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct EstimateSettings {
  std::size_t grid_points = 4097;
  bool write_draws = false;  // draws.jsonl next to the band
};

struct TheorySettings {
  std::vector<double> betas{1.0, 0.5};
  double n = 4096;
  double c0 = 0.0;  // 0 selects max(1, tau)
  int j0 = 4;
  double eta = 0.5;
  double m = 2.0;
  double b = 0.1;
  double c = 10.0;
  int margin_draws = 1000;
  double lemma2_b = 0.05;
  int lemma2_draws = 200;
  std::size_t lemma2_n = 2000;
  double lemma2_envelope = 5.0;
  int lemma6_draws = 1000;
  std::vector<int> lemma6_j0{3, 4, 5};
  std::size_t kl_draws = 20000;
  double kl_eps2 = 0.01;
  int kl_levels = 2;
  std::uint64_t seed = 1;
  // Subset of: constraints, rates, partition, margin, lemma2, lemma6, kl_mass.
  std::vector<std::string> checks{"constraints", "rates", "partition", "margin",
                                  "lemma2",      "lemma6", "kl_mass"};
};

struct BasisCheckSettings {
  std::vector<int> vanishing_moments{1, 2, 3, 4};
  int max_level = 6;
  int parseval_draws = 100;
  double tolerance = 1e-7;
};

struct Config {
  ExperimentConfig experiment;
  EstimateSettings estimate;
  TheorySettings theory;
  BasisCheckSettings basis_check;
};

// Every key is optional; unknown keys are rejected. Throws ConfigError.
Config ParseConfig(const nlohmann::json& doc);
// Reads and parses a file; unreadable files and JSON syntax errors are ConfigErrors at "".
Config LoadConfig(const std::filesystem::path& path);
// Full configuration with every default filled in, plus the slab normalizer.
nlohmann::json ToJson(const Config& config);

}  // namespace wavedens
