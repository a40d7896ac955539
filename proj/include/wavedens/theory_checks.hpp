#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/logdensity_model.hpp"
#include "wavedens/posterior_sampler.hpp"
#include "wavedens/spike_slab_prior.hpp"
#include "wavedens/wavelet_basis.hpp"

namespace wavedens {

// (log n / n)^{beta/(2 beta + 1)}, natural log.
double MinimaxRate(double n, double beta);

enum class Regime { kHigh, kLow };  // beta > 1/2, beta <= 1/2

// Level-wise thresholds delta_0..delta_{J_n} that define the partition S_I.
struct ThresholdProfile {
  double n = 0.0;
  double beta = 1.0;
  double c0 = 1.0;
  Regime regime = Regime::kHigh;
  int j0 = 4;      // levels <= j0 never enter I
  double eta = 0.5;  // radius of the mixed-norm neighborhood C
  int jn = 0;
  double eps_star = 0.0;
  std::vector<double> delta;

  static ThresholdProfile Make(double n, double beta, double c0, int j0, double eta, int jn);
  // delta_j; throws std::out_of_range above J_n.
  double at(int j) const;
};

// Largest J with C0 2^{-J(beta+1/2)} still above the flat part of the profile.
int JStar(double n, double beta, double c0);

struct PartitionKey {
  std::vector<WaveletIndex> indices;  // I, sorted
  std::optional<int> slice;           // s, absent when I is empty

  bool empty() const { return indices.empty(); }
  friend bool operator==(const PartitionKey&, const PartitionKey&) = default;
};

// r_I = sqrt(sum_{(j,k) in I} delta_j^2).
double SliceRadius(const std::vector<WaveletIndex>& indices, const ThresholdProfile& profile);

// I = {(j,k): j0 < j <= J_n, |theta + c(theta) - theta0| > M delta_j}, and s the
// smallest integer with ||P_I(theta - theta0)||_2 <= sqrt(s+1) M r_I.
PartitionKey ClassifyPartition(const CoeffVector& theta, const CoeffVector& theta0,
                               const CoeffVector& c, const ThresholdProfile& profile, double m);

// sum_{I} |theta - theta0| 2^{-j/2} sum_{l=0}^{J_n} 2^{l/2} delta_l 2^{-max(j,l) kappa}.
double FunctionalRn(const std::vector<WaveletIndex>& indices, const CoeffVector& theta,
                    const CoeffVector& theta0, double kappa, const ThresholdProfile& profile);

struct MarginReport {
  double margin = 0.0;  // lhs - rhs; negative means the inequality holds
  double lhs = 0.0;
  double rhs = 0.0;
  // sup_j delta_j 2^{j(kappa' + 1/2)} with kappa' = min(1, beta).
  double sup_clause = 0.0;
  double mixed_norm = 0.0;
};

// Throws std::invalid_argument when theta is not in S_I (for this profile and
// M) or not in the mixed-norm neighborhood C.
MarginReport Assumption1Margin(const WaveletBasis& basis, const PartitionKey& key,
                               const CoeffVector& theta, const CoeffVector& theta0,
                               const ThresholdProfile& profile, double m, double b, double c,
                               double kappa);

// Random member of S_I intersected with C with I nonempty: a few planted
// threshold violations above j0 plus small perturbations elsewhere, shrunk
// until the mixed-norm constraint holds. In the low regime I has at most 2
// indices, otherwise at most 4.
CoeffVector SampleSliceMember(const WaveletBasis& basis, const CoeffVector& theta0,
                              const ThresholdProfile& profile, double m, Rng& rng);

struct Lemma2Report {
  double lhs = 0.0;       // P_n(lambda_{alpha+gamma} - lambda_0)
  double expansion = 0.0;  // with -P0[g(e^h - 1)]
  double expansion_plus = 0.0;  // same with the cross term added instead
  double residual = 0.0;  // |lhs - expansion|
  double residual_plus = 0.0;
  double scale = 0.0;     // B (P0[g^2] + P0[g]^2)
  double p0_g = 0.0;
  double p0_g2 = 0.0;
  double sup_g = 0.0;
  double sup_h = 0.0;
};

// alpha lives on the wavelet indices I, gamma on the complement. P0 integrals
// are exact sums over the basis cells. Throws std::invalid_argument if
// ||g||_inf or ||h||_inf exceeds b, if b > 1, or if I holds a scaling index.
Lemma2Report Lemma2Residual(const WaveletBasis& basis, const std::vector<WaveletIndex>& indices,
                            const CoeffVector& alpha, const CoeffVector& gamma,
                            const CoeffVector& theta0, const Dataset& data, double b);

// P0[g]^2 / (2^{-2 j0 beta} P0[g^2]) for g = sum_I (alpha - theta0) psi.
// Throws std::domain_error when g vanishes and std::invalid_argument when I
// reaches level j0.
double Lemma6Ratio(const WaveletBasis& basis, const std::vector<WaveletIndex>& indices,
                   const CoeffVector& alpha, const CoeffVector& theta0, int j0, double beta);

struct MassEstimate {
  std::size_t hits = 0;
  std::size_t draws = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  // One-sided 95% upper bound; the only informative number when hits == 0.
  double upper95 = 0.0;
};

// Monte Carlo mass of {KL(P0, P_theta) <= eps^2, V(P0, P_theta) <= eps^2}.
MassEstimate PriorKlBallMass(const SpikeSlabPrior& prior, const WaveletBasis& basis,
                             const LogDensityModel& truth, double eps, std::size_t draws,
                             Rng& rng);

struct CheckRow {
  std::string name;
  std::string parameters;
  double value = 0.0;
  bool pass = true;
};

}  // namespace wavedens
