#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace wavedens {

enum class WaveletKind : std::uint8_t { kScaling = 0, kWavelet = 1 };

// (level, position, kind). Scaling indices exist only at the coarse level j0.
// Ordering is scaling-first, then wavelets by (level, position); serialized
// coefficient vectors rely on this order being stable.
struct WaveletIndex {
  int j = 0;
  int k = 0;
  WaveletKind kind = WaveletKind::kWavelet;

  static WaveletIndex Scaling(int j, int k) { return {j, k, WaveletKind::kScaling}; }
  static WaveletIndex Wavelet(int j, int k) { return {j, k, WaveletKind::kWavelet}; }

  bool is_scaling() const { return kind == WaveletKind::kScaling; }

  friend bool operator==(const WaveletIndex&, const WaveletIndex&) = default;
  friend std::strong_ordering operator<=>(const WaveletIndex& a, const WaveletIndex& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.k <=> b.k;
  }

  std::string ToString() const;
};

}  // namespace wavedens
