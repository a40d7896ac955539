#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/wavelet_basis.hpp"

namespace wavedens {

using Rng = std::mt19937_64;

enum class SlabFamily { kDoubleExponential, kLaplace, kGaussian, kCustomTable };

std::string ToString(SlabFamily family);
SlabFamily SlabFamilyFromString(const std::string& name);

// Standardized slab density f. The default f(x) = exp(-e^|x|) / Z_f has
// doubly-exponential tails; Laplace and Gaussian are available mainly to
// exercise the tail check. A custom table is a piecewise-linear density on
// symmetric knots, zero outside the table.
class SlabDensity {
 public:
  static SlabDensity DoubleExponential();
  static SlabDensity Laplace();
  static SlabDensity Gaussian();
  // Knots strictly increasing; values >= 0 and not all zero. Normalized on construction.
  static SlabDensity CustomTable(std::vector<double> knots, std::vector<double> values);

  SlabFamily family() const { return family_; }
  double LogPdf(double x) const;
  // log P(|Z| > t), t >= 0.
  double LogTwoSidedTail(double t) const;
  double Sample(Rng& rng) const;
  // Stored normalizer of the default family (2 E1(1)).
  static double DoubleExponentialNormalizer();

 private:
  SlabFamily family_ = SlabFamily::kDoubleExponential;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> cdf_;
};

// Exponential integral E1 in log form, usable far into the tail.
double LogExpIntegralE1(double x);

enum class OmegaRule { kParametric, kExplicit };

struct PriorSpec {
  double beta0 = 0.25;
  double a1 = 0.5;
  double b1 = 1.0;
  double mu_star = 1.5;
  // J_n; negative selects ceil(log2 n) at run time.
  int truncation_level = -1;
  OmegaRule omega_rule = OmegaRule::kParametric;
  std::vector<double> omega_explicit;  // omega_0..omega_{J_n}
  SlabFamily slab_family = SlabFamily::kDoubleExponential;
  std::vector<double> custom_knots;
  std::vector<double> custom_values;
  // When set, the coarse scaling coefficients carry the slab only (no spike).
  bool scaling_always_active = false;
};

int DefaultTruncationLevel(std::size_t n);

struct ConstraintRow {
  std::string name;
  std::string parameters;
  double value = 0.0;
  bool pass = true;
};

struct ConstraintReport {
  std::vector<ConstraintRow> rows;
  bool ok() const;
  // First failing row, if any.
  std::optional<ConstraintRow> first_violation() const;
};

// theta_{j,k} ~ (1 - omega_j) delta_0 + omega_j q_j with
// q_j(x) = 2^{j(beta0+1/2)} f(2^{j(beta0+1/2)} x), for all j <= J_n.
class SpikeSlabPrior {
 public:
  SpikeSlabPrior(const PriorSpec& spec, int truncation_level);

  const PriorSpec& spec() const { return spec_; }
  int truncation_level() const { return jn_; }
  const SlabDensity& slab() const { return slab_; }

  double omega(int j) const;
  // 2^{-j(beta0+1/2)}: standard deviation scale of active level-j values.
  double slab_scale(int j) const;
  double LogSlab(int j, double value) const;
  double SampleSlab(int j, Rng& rng) const;
  // True if idx takes part in birth/death moves.
  bool HasSpike(const WaveletIndex& idx) const;

  // log(1 - omega_j) at 0, log omega_j + log q_j(value) otherwise; nullopt
  // above J_n, where coefficients are structurally zero. Indices without a
  // spike get log q_j(value) for every value.
  std::optional<double> LogPriorPoint(const WaveletIndex& idx, double value) const;

  // Independent draw over every basis index with j <= min(J_n, max level).
  CoeffVector Sample(const WaveletBasis& basis, Rng& rng) const;

  // Corridor a1 2^{-j(1+b1)} <= omega_j <= 2^{-(1+mu*)} on every level, the
  // slab tail bound sup_{x > x0} e^{b2 x} P(|Z| > log x) <= 1 on [x0, 1e4],
  // and strict positivity of f on [-G, G] for G in {1, 5, 20}.
  ConstraintReport CheckConstraints(double b2 = 0.5, double x0 = 10.0) const;

 private:
  PriorSpec spec_;
  int jn_;
  SlabDensity slab_;
};

}  // namespace wavedens
