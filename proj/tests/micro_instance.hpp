#pragma once

// Frozen four-coefficient Haar instance (levels 0 and 1, n = 50) shared by
// the sampler tests and the acceptance binary.

#include <vector>

#include "wavedens/experiments.hpp"
#include "wavedens/posterior_sampler.hpp"

namespace wavedens::testing {

struct MicroInstance {
  WaveletBasis basis{BasisSpec{1, 0, 10}};
  SpikeSlabPrior prior{PriorSpec{}, 1};
  Dataset data;
  std::vector<WaveletIndex> indices{WaveletIndex::Scaling(0, 0), WaveletIndex::Wavelet(0, 0),
                                    WaveletIndex::Wavelet(1, 0), WaveletIndex::Wavelet(1, 1)};

  MicroInstance() {
    CoeffVector theta;
    theta.Set(WaveletIndex::Wavelet(0, 0), 0.6);
    theta.Set(WaveletIndex::Wavelet(1, 1), -0.5);
    const LogDensityModel truth(basis, theta);
    Rng rng(2024);
    data = SampleData(truth, 50, rng);
  }

  // 41-point grids wide enough to hold the slab and the likelihood bulk.
  std::vector<std::vector<double>> Grids() const {
    std::vector<std::vector<double>> grids;
    for (const auto& idx : indices) {
      const double half = idx.j == 0 ? 2.5 : 2.0;
      std::vector<double> g(41);
      for (int i = 0; i < 41; ++i) g[i] = -half + 2.0 * half * i / 40.0;
      grids.push_back(g);
    }
    return grids;
  }
};

struct ChainEstimate {
  std::vector<double> inclusion;
  std::vector<double> mean_given_active;
};

// Plain sweeps without adaptation, every sweep recorded after burn-in.
inline ChainEstimate RunMicroChain(const MicroInstance& m, int sweeps, std::uint64_t seed) {
  ChainState state(m.basis, m.prior, m.data);
  SamplerConfig config;
  config.toggle_attempts_per_sweep = 8;
  Rng rng(seed);
  const int burn = 2000;
  std::vector<double> on(m.indices.size(), 0.0), sum(m.indices.size(), 0.0);
  for (int s = 0; s < burn + sweeps; ++s) {
    state.Sweep(rng, config);
    if (s < burn) continue;
    for (std::size_t i = 0; i < m.indices.size(); ++i) {
      const double v = state.theta().Get(m.indices[i]);
      if (v != 0.0) {
        on[i] += 1.0;
        sum[i] += v;
      }
    }
  }
  ChainEstimate out;
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    out.inclusion.push_back(on[i] / sweeps);
    out.mean_given_active.push_back(on[i] > 0 ? sum[i] / on[i] : 0.0);
  }
  return out;
}

}  // namespace wavedens::testing
