#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wavedens/coeff_vector.hpp"
#include "wavedens/wavelet_index.hpp"

namespace wavedens {

struct BasisSpec {
  // S; S = 1 selects Haar.
  int vanishing_moments = 2;
  // j0; for S >= 2 we need 2^j0 >= 2S so the two edges do not interact.
  int coarse_level = 2;
  // L; every basis function is represented on the 2^L dyadic cells of [0,1].
  int eval_resolution = 12;

  // Throws std::invalid_argument on a violated invariant.
  void Validate() const;
  int MaxLevel() const { return eval_resolution - 1; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool Contains(double x) const { return x >= lo && x <= hi; }
};

// Values of one basis function on a contiguous run of cells. Outside
// [first, first + values.size()) the function is exactly zero.
struct CellSpan {
  std::size_t first = 0;
  std::span<const double> values;
  std::size_t end() const { return first + values.size(); }
};

// Orthonormal, boundary-corrected wavelet basis on [0,1].
//
// Interior functions are Daubechies translates with S vanishing moments. Near
// each edge, S scaling functions are generated by restricting the translates
// that straddle the boundary with polynomial coefficient sequences of degree
// < S, which keeps V_j nested and polynomial-reproducing; the S edge wavelets
// per side span the orthogonal complement of V_j in V_{j+1} after the
// interior wavelets are removed.
//
// The multiresolution is realized at finite depth: V_L is the space of
// functions constant on the 2^L dyadic cells, and each function is stored as
// its cell values (the cascade of its filter coefficients down to level L).
// All inner products are therefore exact sums over cells, the basis is
// orthonormal to rounding error, and every wavelet integrates to zero.
// Haar (S = 1) is built in closed form.
//
// Immutable after construction; safe to share between threads.
class WaveletBasis {
 public:
  explicit WaveletBasis(const BasisSpec& spec);
  ~WaveletBasis();
  WaveletBasis(WaveletBasis&&) noexcept;
  WaveletBasis& operator=(WaveletBasis&&) noexcept;
  WaveletBasis(const WaveletBasis&) = delete;
  WaveletBasis& operator=(const WaveletBasis&) = delete;

  const BasisSpec& spec() const { return spec_; }
  int vanishing_moments() const { return spec_.vanishing_moments; }
  int coarse_level() const { return spec_.coarse_level; }
  int resolution() const { return spec_.eval_resolution; }
  int max_level() const { return spec_.MaxLevel(); }
  bool is_haar() const { return spec_.vanishing_moments == 1; }
  std::size_t cell_count() const { return std::size_t{1} << spec_.eval_resolution; }
  double cell_width() const { return 1.0 / static_cast<double>(cell_count()); }
  // Index of the cell containing x (x = 1 maps to the last cell).
  std::size_t CellOf(double x) const;

  bool Contains(const WaveletIndex& idx) const;
  // Scaling indices at j0 first, then wavelets level by level up to max_level.
  std::vector<WaveletIndex> Enumerate(int max_level) const;
  // Dense position in Enumerate order: k for scaling, 2^j + k for wavelets.
  static std::size_t FlatIndex(const WaveletIndex& idx);
  WaveletIndex FromFlat(std::size_t flat) const;
  // Number of indices with level <= max_level.
  static std::size_t CountUpTo(int max_level) { return std::size_t{2} << max_level; }

  // psi_{j,k}(x); exact for the cell representation. Throws std::out_of_range
  // for an invalid index and std::domain_error for x outside [0,1].
  double Evaluate(const WaveletIndex& idx, double x) const;
  // Cell values of psi_{j,k}.
  CellSpan Cells(const WaveletIndex& idx) const;
  // Smallest interval on the 2^-(j+1) grid that contains the support.
  Interval Support(const WaveletIndex& idx) const;
  // Integral over [0,1]: zero for wavelets (up to rounding), nonzero for scaling functions.
  double Integral(const WaveletIndex& idx) const;

  // <f, psi> for every index with level <= max_level. Each cell integral uses
  // a 5-point Gauss-Legendre rule, which is the exact pairing against the
  // piecewise-constant basis functions.
  CoeffVector Analyze(const std::function<double(double)>& f, int max_level,
                      double drop_below = 0.0) const;
  // Same from precomputed cell integrals (size cell_count()).
  CoeffVector AnalyzeCellIntegrals(std::span<const double> cell_integrals, int max_level,
                                   double drop_below = 0.0) const;

  // sum theta_{j,k} psi_{j,k}(x); only terms whose support contains x contribute.
  double Synthesize(const CoeffVector& coeffs, double x) const;
  // out[b] += sum theta psi on cell b.
  void SynthesizeCells(const CoeffVector& coeffs, std::span<double> out) const;

  // Opaque cell tables; defined in the implementation.
  struct Storage;

 private:
  BasisSpec spec_;
  std::unique_ptr<Storage> storage_;
};

// Lowpass filter h of the Daubechies wavelet with S vanishing moments (sum = sqrt 2).
std::span<const double> DaubechiesFilter(int vanishing_moments);

}  // namespace wavedens
