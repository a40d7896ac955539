#include "wavedens/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavedens {

GaussRule GaussLegendre(int points) {
  if (points < 1) throw std::invalid_argument("GaussLegendre: points must be >= 1");
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = points == 1 ? x : p1;
      const double pnm1 = points == 1 ? 1.0 : p0;
      dp = points * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pnm1 = points == 1 ? 1.0 : p0;
    const double pn = points == 1 ? x : p1;
    dp = points * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
  return rule;
}

std::vector<double> DyadicCellIntegrals(const std::function<double(double)>& f, int level,
                                        int points) {
  const GaussRule rule = GaussLegendre(points);
  const std::size_t cells = std::size_t{1} << level;
  const double h = 1.0 / static_cast<double>(cells);
  std::vector<double> out(cells);
  for (std::size_t b = 0; b < cells; ++b) {
    const double mid = (static_cast<double>(b) + 0.5) * h;
    double s = 0.0;
    for (int q = 0; q < points; ++q) s += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
    out[b] = 0.5 * h * s;
  }
  return out;
}

double IntegrateDyadic(const std::function<double(double)>& f, int level, int points) {
  double s = 0.0;
  for (double v : DyadicCellIntegrals(f, level, points)) s += v;
  return s;
}

}  // namespace wavedens
