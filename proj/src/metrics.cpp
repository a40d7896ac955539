#include "wavedens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "wavedens/kernels.hpp"
#include "wavedens/quadrature.hpp"

namespace wavedens {
namespace {

void RequirePositive(double v, const char* which) {
  if (!(v > 0.0)) {
    throw std::domain_error(std::string("non-positive density value in ") + which);
  }
}

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

GridSpec GridSpec::ForLevel(int finest_level) {
  GridSpec g;
  const std::size_t needed = (std::size_t{1} << (std::max(finest_level, 0) + 3)) + 1;
  g.points = std::max<std::size_t>(g.points, needed);
  return g;
}

double SupNormDiff(const RealFn& f, const RealFn& g, const GridSpec& grid) {
  if (grid.points < 2) throw std::invalid_argument("grid needs at least 2 points");
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    worst = std::max(worst, std::fabs(f(x) - g(x)));
  }
  return worst;
}

double SupNormDiffCells(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cell vectors differ in size");
  return kernels::MaxAbsDiff(a, b);
}

double MixedNorm1Inf(const CoeffVector& theta) {
  std::map<int, double> level_max;
  for (const auto& [idx, v] : theta) {
    double& m = level_max[idx.j];
    m = std::max(m, std::fabs(v));
  }
  double s = 0.0;
  for (const auto& [j, m] : level_max) s += std::exp2(0.5 * j) * m;
  return s;
}

double L2NormDiff(const RealFn& f, const RealFn& g, const QuadratureSpec& quad) {
  const double s = IntegrateDyadic(
      [&](double x) {
        const double d = f(x) - g(x);
        return d * d;
      },
      quad.level, quad.points);
  return std::sqrt(s);
}

double Hellinger(const RealFn& p, const RealFn& q, const QuadratureSpec& quad) {
  const double s = IntegrateDyadic(
      [&](double x) {
        const double a = p(x);
        const double b = q(x);
        RequirePositive(a, "Hellinger");
        RequirePositive(b, "Hellinger");
        const double d = std::sqrt(a) - std::sqrt(b);
        return d * d;
      },
      quad.level, quad.points);
  return std::sqrt(s);
}

double KullbackLeibler(const RealFn& p, const RealFn& q, const QuadratureSpec& quad) {
  return IntegrateDyadic(
      [&](double x) {
        const double a = p(x);
        const double b = q(x);
        RequirePositive(a, "KL");
        RequirePositive(b, "KL");
        return a * std::log(a / b);
      },
      quad.level, quad.points);
}

double VDivergence(const RealFn& p, const RealFn& q, const QuadratureSpec& quad) {
  return IntegrateDyadic(
      [&](double x) {
        const double a = p(x);
        const double b = q(x);
        RequirePositive(a, "V");
        RequirePositive(b, "V");
        const double l = std::log(a / b);
        return a * l * l;
      },
      quad.level, quad.points);
}

double DerivSupNorm(const RealFn& f, const RealFn& g, int order, const GridSpec& grid,
                    int vanishing_moments) {
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (order >= 1 && order >= vanishing_moments - 1) {
    throw std::invalid_argument("derivative order " + std::to_string(order) +
                                " too large for a basis with S = " +
                                std::to_string(vanishing_moments));
  }
  if (order == 0) return SupNormDiff(f, g, grid);
  const double h = grid.spacing();
  const double reach = 0.5 * order * h;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    if (x - reach < 0.0 || x + reach > 1.0) continue;
    double d = 0.0;
    for (int k = 0; k <= order; ++k) {
      const double y = std::clamp(x + (0.5 * order - k) * h, 0.0, 1.0);
      const double c = ((k % 2 == 0) ? 1.0 : -1.0) * Binomial(order, k);
      d += c * (f(y) - g(y));
    }
    worst = std::max(worst, std::fabs(d / std::pow(h, order)));
  }
  return worst;
}

}  // namespace wavedens
