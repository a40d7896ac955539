#include "wavedens/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace wavedens::kernels {
namespace {

std::vector<double> Random(std::size_t n, std::uint32_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    if (Avx2Kernels() == nullptr || !CpuSupportsAvx2()) GTEST_SKIP() << "no AVX2 on this host";
  }
};

TEST_P(KernelEquivalence, ReductionsMatchScalar) {
  const std::size_t n = GetParam();
  const auto a = Random(n, 1, 3.0);
  const auto b = Random(n, 2, 3.0);
  const KernelTable& s = ScalarKernels();
  const KernelTable& v = *Avx2Kernels();
  const double tol = 1e-12 * (1.0 + static_cast<double>(n));
  EXPECT_NEAR(s.sum(a.data(), n), v.sum(a.data(), n), tol);
  EXPECT_NEAR(s.dot(a.data(), b.data(), n), v.dot(a.data(), b.data(), n), 10 * tol);
  if (n > 0) {
    EXPECT_EQ(s.max(a.data(), n), v.max(a.data(), n));
    EXPECT_EQ(s.max_abs_diff(a.data(), b.data(), n), v.max_abs_diff(a.data(), b.data(), n));
  }
}

TEST_P(KernelEquivalence, ExpKernelsMatchScalar) {
  const std::size_t n = GetParam();
  const auto v0 = Random(n, 3, 2.0);
  const auto w = Random(n, 4, 1.0);
  std::vector<double> sv(n), se(n), av(n), ae(n);
  const double s_total = ScalarKernels().axpy_exp_sum(v0.data(), w.data(), 0.7, 1.5, sv.data(), se.data(), n);
  const double a_total = Avx2Kernels()->axpy_exp_sum(v0.data(), w.data(), 0.7, 1.5, av.data(), ae.data(), n);
  EXPECT_NEAR(s_total, a_total, 1e-12 * (1.0 + s_total));
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(sv[i], av[i], 1e-15 * (1.0 + std::fabs(sv[i])));
    EXPECT_NEAR(se[i], ae[i], 1e-13 * se[i]);
  }
  const double s_exp = ScalarKernels().exp_sum(v0.data(), -0.25, se.data(), n);
  const double a_exp = Avx2Kernels()->exp_sum(v0.data(), -0.25, ae.data(), n);
  EXPECT_NEAR(s_exp, a_exp, 1e-12 * (1.0 + s_exp));
}

TEST_P(KernelEquivalence, AxpyMatchesScalar) {
  const std::size_t n = GetParam();
  const auto x = Random(n, 5, 1.0);
  auto ys = Random(n, 6, 1.0);
  auto ya = ys;
  ScalarKernels().axpy(-1.25, x.data(), ys.data(), n);
  Avx2Kernels()->axpy(-1.25, x.data(), ya.data(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ys[i], ya[i], 1e-15);
}

// Lengths around the vector width exercise the remainder loops.
INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 1023, 4096));

TEST(KernelDispatch, ForceScalarIsHonored) {
  ASSERT_TRUE(ForceIsa(Isa::kScalar));
  EXPECT_EQ(Active().isa, Isa::kScalar);
  if (Avx2Kernels() != nullptr && CpuSupportsAvx2()) {
    ASSERT_TRUE(ForceIsa(Isa::kAvx2));
    EXPECT_EQ(Active().isa, Isa::kAvx2);
  }
}

TEST(KernelScalar, ExpSumIsExactForZeros) {
  std::vector<double> v(10, 0.0), e(10);
  EXPECT_DOUBLE_EQ(ScalarKernels().exp_sum(v.data(), 0.0, e.data(), v.size()), 10.0);
}

}  // namespace
}  // namespace wavedens::kernels
