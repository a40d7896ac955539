#pragma once

#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>

#include "wavedens/wavelet_index.hpp"

namespace wavedens {

// Sparse coefficient vector theta indexed by WaveletIndex. Zero is never
// stored: Set(idx, 0.0) removes the entry, so size() is the number of active
// coefficients.
class CoeffVector {
 public:
  using Map = std::map<WaveletIndex, double>;
  using const_iterator = Map::const_iterator;

  CoeffVector() = default;

  double Get(const WaveletIndex& idx) const;
  void Set(const WaveletIndex& idx, double value);
  void Add(const WaveletIndex& idx, double delta) { Set(idx, Get(idx) + delta); }
  bool Contains(const WaveletIndex& idx) const { return values_.count(idx) != 0; }
  void Clear() { values_.clear(); }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const_iterator begin() const { return values_.begin(); }
  const_iterator end() const { return values_.end(); }

  // Largest level carrying a nonzero entry.
  std::optional<int> MaxLevel() const;
  double L2Norm() const;
  // Entries restricted to levels in [lo, hi].
  CoeffVector RestrictLevels(int lo, int hi) const;

  friend CoeffVector operator+(const CoeffVector& a, const CoeffVector& b);
  friend CoeffVector operator-(const CoeffVector& a, const CoeffVector& b);
  friend bool operator==(const CoeffVector&, const CoeffVector&) = default;

  // {"j0":..,"S":..,"entries":[{"j":..,"k":..,"kind":"s"|"w","v":..},..]}
  nlohmann::json ToJson(int j0, int vanishing_moments) const;
  static CoeffVector FromJson(const nlohmann::json& doc);

 private:
  Map values_;
};

}  // namespace wavedens
