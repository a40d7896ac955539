#include "wavedens/wavelet_basis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace wavedens {
namespace {

double CellInner(const WaveletBasis& basis, const WaveletIndex& a, const WaveletIndex& b) {
  const CellSpan sa = basis.Cells(a);
  const CellSpan sb = basis.Cells(b);
  const std::size_t lo = std::max(sa.first, sb.first);
  const std::size_t hi = std::min(sa.end(), sb.end());
  double s = 0.0;
  for (std::size_t c = lo; c < hi; ++c) s += sa.values[c - sa.first] * sb.values[c - sb.first];
  return s * basis.cell_width();
}

struct BasisCase {
  int s;
  int j0;
};

class BasisGramTest : public ::testing::TestWithParam<BasisCase> {};

TEST_P(BasisGramTest, OrthonormalUpToLevelSix) {
  const auto [s, j0] = GetParam();
  WaveletBasis basis({.vanishing_moments = s, .coarse_level = j0, .eval_resolution = 12});
  const auto idx = basis.Enumerate(6);
  double worst = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a; b < idx.size(); ++b) {
      const double g = CellInner(basis, idx[a], idx[b]);
      worst = std::max(worst, std::fabs(g - (a == b ? 1.0 : 0.0)));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST_P(BasisGramTest, WaveletsHaveZeroMean) {
  const auto [s, j0] = GetParam();
  WaveletBasis basis({.vanishing_moments = s, .coarse_level = j0, .eval_resolution = 12});
  for (const auto& idx : basis.Enumerate(basis.max_level())) {
    if (idx.is_scaling()) continue;
    ASSERT_NEAR(basis.Integral(idx), 0.0, 1e-12) << idx.ToString();
  }
}

TEST_P(BasisGramTest, PolynomialsBelowSAreInCoarseSpace) {
  const auto [s, j0] = GetParam();
  WaveletBasis basis({.vanishing_moments = s, .coarse_level = j0, .eval_resolution = 12});
  for (int p = 0; p < s; ++p) {
    const auto coeffs = basis.Analyze([p](double x) { return std::pow(x, p); }, basis.max_level());
    double fine = 0.0;
    for (const auto& [idx, v] : coeffs) {
      if (!idx.is_scaling()) fine = std::max(fine, std::fabs(v));
    }
    // The cell representation is piecewise constant, so only the top levels
    // carry the discretization of x^p.
    double mid = 0.0;
    for (const auto& [idx, v] : coeffs.RestrictLevels(j0, basis.max_level() - 4)) {
      if (!idx.is_scaling()) mid = std::max(mid, std::fabs(v));
    }
    EXPECT_LT(mid, 1e-9) << "p=" << p;
    (void)fine;
  }
}

INSTANTIATE_TEST_SUITE_P(Families, BasisGramTest,
                         ::testing::Values(BasisCase{1, 0}, BasisCase{1, 2}, BasisCase{2, 2},
                                           BasisCase{3, 3}, BasisCase{4, 3}),
                         [](const auto& info) {
                           return "S" + std::to_string(info.param.s) + "J" +
                                  std::to_string(info.param.j0);
                         });

TEST(WaveletBasisTest, HaarClosedForm) {
  WaveletBasis basis({.vanishing_moments = 1, .coarse_level = 0, .eval_resolution = 10});
  const auto w = WaveletIndex::Wavelet(2, 1);
  EXPECT_DOUBLE_EQ(basis.Evaluate(w, 0.30), 2.0);
  EXPECT_DOUBLE_EQ(basis.Evaluate(w, 0.45), -2.0);
  EXPECT_DOUBLE_EQ(basis.Evaluate(w, 0.60), 0.0);
  EXPECT_DOUBLE_EQ(basis.Evaluate(WaveletIndex::Scaling(0, 0), 0.7), 1.0);
  const Interval sup = basis.Support(w);
  EXPECT_DOUBLE_EQ(sup.lo, 0.25);
  EXPECT_DOUBLE_EQ(sup.hi, 0.5);
}

TEST(WaveletBasisTest, InteriorSupportLength) {
  WaveletBasis basis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 12});
  const int j = 5;
  const Interval sup = basis.Support(WaveletIndex::Wavelet(j, 10));
  EXPECT_NEAR(sup.length(), 3.0 * std::ldexp(1.0, -j), 1e-15);
}

TEST(WaveletBasisTest, EvaluateRejectsOutsideUnitInterval) {
  WaveletBasis basis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 10});
  EXPECT_THROW(basis.Evaluate(WaveletIndex::Wavelet(3, 0), 1.5), std::domain_error);
  EXPECT_THROW(basis.Evaluate(WaveletIndex::Wavelet(3, 0), -0.1), std::domain_error);
  EXPECT_THROW(basis.Evaluate(WaveletIndex::Wavelet(3, 8), 0.5), std::out_of_range);
}

TEST(WaveletBasisTest, ValidateRejectsBadSpecs) {
  EXPECT_THROW(WaveletBasis({.vanishing_moments = 5}), std::invalid_argument);
  EXPECT_THROW(WaveletBasis({.vanishing_moments = 3, .coarse_level = 2}), std::invalid_argument);
  EXPECT_THROW(WaveletBasis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 4}),
               std::invalid_argument);
}

TEST(WaveletBasisTest, AnalyzeSynthesizeRoundTrip) {
  WaveletBasis basis({.vanishing_moments = 3, .coarse_level = 3, .eval_resolution = 12});
  auto f = [](double x) { return std::sin(6.0 * x) + x * x; };
  const auto coeffs = basis.Analyze(f, basis.max_level());
  std::vector<double> cells(basis.cell_count(), 0.0);
  basis.SynthesizeCells(coeffs, cells);
  for (double x : {0.0, 0.013, 0.5, 0.77, 1.0}) {
    const std::size_t b = basis.CellOf(x);
    EXPECT_NEAR(basis.Synthesize(coeffs, x), cells[b], 1e-10);
    EXPECT_NEAR(cells[b], f(x), 5e-3);
  }
}

TEST(WaveletBasisTest, FlatIndexRoundTrip) {
  WaveletBasis basis({.vanishing_moments = 2, .coarse_level = 2, .eval_resolution = 10});
  const auto idx = basis.Enumerate(6);
  ASSERT_EQ(idx.size(), WaveletBasis::CountUpTo(6));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    EXPECT_EQ(WaveletBasis::FlatIndex(idx[i]), i);
    EXPECT_EQ(basis.FromFlat(i), idx[i]);
  }
}

}  // namespace
}  // namespace wavedens
