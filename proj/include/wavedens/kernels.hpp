#pragma once

// Data-parallel inner loops used by the log-partition caches, the sufficient
// statistics and the metrics. Every kernel has a portable scalar reference
// and an AVX2/FMA variant; the variant is picked once at runtime from CPUID
// and can be overridden (tests compare both paths on the same inputs).

#include <cstddef>
#include <span>
#include <string_view>

namespace wavedens::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // out_v[i] = v[i] + a * w[i]; out_e[i] = exp(out_v[i] - shift); returns sum(out_e).
  double (*axpy_exp_sum)(const double* v, const double* w, double a, double shift,
                         double* out_v, double* out_e, std::size_t n);
  // out_e[i] = exp(v[i] - shift); returns sum(out_e).
  double (*exp_sum)(const double* v, double shift, double* out_e, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max)(const double* x, std::size_t n);
  // max |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& ScalarKernels();
// nullptr when the binary was built without AVX2 support.
const KernelTable* Avx2Kernels();
bool CpuSupportsAvx2();

// The table used by the library. Defaults to the best supported ISA unless the
// environment variable WAVEDENS_ISA=scalar is set.
const KernelTable& Active();
// Overrides the dispatch (returns false if the ISA is unavailable).
bool ForceIsa(Isa isa);
std::string_view IsaName(Isa isa);

// Convenience span wrappers over Active().
inline double Sum(std::span<const double> x) { return Active().sum(x.data(), x.size()); }
inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}
inline double Max(std::span<const double> x) { return Active().max(x.data(), x.size()); }
inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  return Active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace wavedens::kernels
