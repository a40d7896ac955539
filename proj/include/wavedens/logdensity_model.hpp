#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/wavelet_basis.hpp"

namespace wavedens {

// One node per dyadic cell of the basis resolution, placed at the cell
// midpoint with weight 2^-L. Every model function is constant on these cells,
// so the rule integrates exp(sum theta psi) exactly.
struct QuadratureGrid {
  int level = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static QuadratureGrid ForBasis(const WaveletBasis& basis);
  std::size_t size() const { return nodes.size(); }
};

// log of the integral of exp(sum theta psi) over [0,1], computed from scratch.
double LogPartition(const WaveletBasis& basis, const CoeffVector& theta);

// c_{j,k}(theta) = -(integral of psi_{j,k}) * log Z(theta) on the scaling
// indices; wavelet entries are structurally zero and never stored.
CoeffVector CCoefficients(const WaveletBasis& basis, const CoeffVector& theta);

// p_theta = exp(lambda_theta) with lambda_theta = sum (theta + c(theta)) psi.
//
// Keeps v_b = sum theta psi on every quadrature cell, e_b = exp(v_b - shift)
// and per-block sums of e_b. A single-coefficient change touches only the
// cells under that function's support and the blocks that contain them; the
// block sums are recomputed (not adjusted), so log Z carries no drift.
//
// Changes follow a propose/commit protocol: Propose() evaluates the new log Z
// into scratch storage without disturbing the committed state, Commit() makes
// it current. Any other mutation discards a pending proposal.
class LogDensityModel {
 public:
  explicit LogDensityModel(const WaveletBasis& basis, CoeffVector theta = {});

  const WaveletBasis& basis() const { return *basis_; }
  const CoeffVector& theta() const { return theta_; }
  const QuadratureGrid& grid() const { return grid_; }

  double log_partition() const { return log_z_; }
  CoeffVector c_coefficients() const;

  // lambda_theta(x) and p_theta(x) for x in [0,1].
  double LogDensityAt(double x) const;
  double DensityAt(double x) const;
  // lambda_theta on quadrature cell b.
  double LogDensityOnCell(std::size_t b) const { return linear_[b] - log_z_; }
  // sum theta psi on each cell (no normalization).
  std::span<const double> linear_cells() const { return linear_; }
  // lambda_theta on every cell.
  std::vector<double> LogDensityCells() const;

  // Log-partition after setting theta[idx] = value; the model is unchanged
  // until Commit().
  double Propose(const WaveletIndex& idx, double value);
  void Commit();
  bool has_pending() const { return pending_.active; }
  // Number of cells rewritten by the last Propose().
  std::size_t last_touched_cells() const { return pending_.touched; }

  void Set(const WaveletIndex& idx, double value);
  void Reset(CoeffVector theta);
  // Recomputes every cache from theta.
  void Rebuild();

  // Writes "x,lambda,p" rows on a uniform grid of `points` points in [0,1].
  void WriteSnapshotCsv(std::ostream& out, std::size_t points = 4097) const;

 private:
  static constexpr std::size_t kBlock = 256;

  struct Pending {
    bool active = false;
    bool rebuild = false;  // shift moved: commit through a full rebuild
    WaveletIndex idx;
    double value = 0.0;
    double log_z = 0.0;
    std::size_t first = 0;  // cell range written into scratch
    std::size_t touched = 0;
    std::size_t block_first = 0;
    std::vector<double> linear;
    std::vector<double> expo;
    std::vector<double> block_sums;
  };

  double TotalFromBlocks(std::size_t block_first, std::span<const double> replaced) const;
  double ProposeSlow(const WaveletIndex& idx, double value);

  const WaveletBasis* basis_;
  CoeffVector theta_;
  QuadratureGrid grid_;
  std::vector<double> linear_;
  std::vector<double> expo_;
  std::vector<double> block_sums_;
  double shift_ = 0.0;
  double log_z_ = 0.0;
  Pending pending_;
};

}  // namespace wavedens
