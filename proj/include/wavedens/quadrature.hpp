#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wavedens {

// Nodes on [-1, 1] and weights of the n-point Gauss-Legendre rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule GaussLegendre(int points);

// Integral of f over each dyadic cell [b 2^-level, (b+1) 2^-level), using a
// `points`-point Gauss-Legendre rule per cell.
std::vector<double> DyadicCellIntegrals(const std::function<double(double)>& f, int level,
                                        int points = 5);

// Composite Gauss-Legendre integral of f over [0, 1] on dyadic cells.
double IntegrateDyadic(const std::function<double(double)>& f, int level, int points = 5);

}  // namespace wavedens
