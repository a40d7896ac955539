#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "wavedens/coeff_vector.hpp"

namespace wavedens {

using RealFn = std::function<double(double)>;

// Uniform grid x_i = i / (points - 1) on [0,1].
struct GridSpec {
  std::size_t points = 4097;

  double spacing() const { return 1.0 / static_cast<double>(points - 1); }
  double at(std::size_t i) const { return static_cast<double>(i) * spacing(); }
  // At least 8 points per dyadic cell of the finest level, never below the default.
  static GridSpec ForLevel(int finest_level);
};

// Dyadic composite Gauss-Legendre rule for the integral metrics.
struct QuadratureSpec {
  int level = 12;
  int points = 5;
};

double SupNormDiff(const RealFn& f, const RealFn& g, const GridSpec& grid = {});
// Exact sup-norm distance between two functions given by their values on the same cells.
double SupNormDiffCells(std::span<const double> a, std::span<const double> b);

// sum_j 2^{j/2} max_k |theta_{j,k}|; scaling and wavelet entries of the same
// level share one level maximum.
double MixedNorm1Inf(const CoeffVector& theta);

double L2NormDiff(const RealFn& f, const RealFn& g, const QuadratureSpec& quad = {});

// ||sqrt p - sqrt q||_2. Throws std::domain_error if p or q is not positive at a node.
double Hellinger(const RealFn& p, const RealFn& q, const QuadratureSpec& quad = {});
// integral of p log(p/q).
double KullbackLeibler(const RealFn& p, const RealFn& q, const QuadratureSpec& quad = {});
// integral of p log^2(p/q).
double VDivergence(const RealFn& p, const RealFn& q, const QuadratureSpec& quad = {});

// max over interior grid points of |(f - g)^{(r)}| by central differences with
// step equal to the grid spacing (O(h^2) truncation). `vanishing_moments` is
// the S of the basis the functions come from; r >= 1 needs r < S - 1.
double DerivSupNorm(const RealFn& f, const RealFn& g, int order, const GridSpec& grid,
                    int vanishing_moments);

}  // namespace wavedens
