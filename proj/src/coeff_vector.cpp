#include "wavedens/coeff_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace wavedens {

std::string WaveletIndex::ToString() const {
  return std::string(is_scaling() ? "s" : "w") + "(" + std::to_string(j) + "," +
         std::to_string(k) + ")";
}

double CoeffVector::Get(const WaveletIndex& idx) const {
  auto it = values_.find(idx);
  return it == values_.end() ? 0.0 : it->second;
}

void CoeffVector::Set(const WaveletIndex& idx, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite coefficient at " + idx.ToString());
  }
  if (value == 0.0) {
    values_.erase(idx);
  } else {
    values_[idx] = value;
  }
}

std::optional<int> CoeffVector::MaxLevel() const {
  std::optional<int> level;
  for (const auto& [idx, v] : values_) {
    if (!level || idx.j > *level) level = idx.j;
  }
  return level;
}

double CoeffVector::L2Norm() const {
  double s = 0.0;
  for (const auto& [idx, v] : values_) s += v * v;
  return std::sqrt(s);
}

CoeffVector CoeffVector::RestrictLevels(int lo, int hi) const {
  CoeffVector out;
  for (const auto& [idx, v] : values_) {
    if (idx.j >= lo && idx.j <= hi) out.values_.emplace(idx, v);
  }
  return out;
}

CoeffVector operator+(const CoeffVector& a, const CoeffVector& b) {
  CoeffVector out = a;
  for (const auto& [idx, v] : b) out.Add(idx, v);
  return out;
}

CoeffVector operator-(const CoeffVector& a, const CoeffVector& b) {
  CoeffVector out = a;
  for (const auto& [idx, v] : b) out.Add(idx, -v);
  return out;
}

nlohmann::json CoeffVector::ToJson(int j0, int vanishing_moments) const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [idx, v] : values_) {
    entries.push_back({{"j", idx.j}, {"k", idx.k}, {"kind", idx.is_scaling() ? "s" : "w"},
                       {"v", v}});
  }
  nlohmann::json doc;
  doc["j0"] = j0;
  doc["S"] = vanishing_moments;
  doc["entries"] = std::move(entries);
  return doc;
}

CoeffVector CoeffVector::FromJson(const nlohmann::json& doc) {
  CoeffVector out;
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    throw std::invalid_argument("coefficient vector: missing \"entries\" array");
  }
  for (const auto& e : doc["entries"]) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind != "s" && kind != "w") {
      throw std::invalid_argument("coefficient vector: kind must be \"s\" or \"w\"");
    }
    WaveletIndex idx{e.at("j").get<int>(), e.at("k").get<int>(),
                     kind == "s" ? WaveletKind::kScaling : WaveletKind::kWavelet};
    out.Set(idx, e.at("v").get<double>());
  }
  return out;
}

}  // namespace wavedens
