// Compiled with -mavx2 -mfma. Nothing in here may be called unless
// CpuSupportsAvx2() returned true.

#include <cmath>
#include <limits>

#include "wavedens/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace wavedens::kernels {
namespace {

// exp(x) for four lanes. Range reduction x = n*ln2 + r with |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation < 1e-17 relative) and 2^n assembled
// in the exponent bits. Inputs below -708 flush to zero, above 709 saturate.
inline __m256d Exp4(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // Horner on 1/k! coefficients, highest order first.
  static constexpr double kInvFact[14] = {
      1.0,
      1.0,
      0.5,
      1.6666666666666666667e-1,
      4.1666666666666666667e-2,
      8.3333333333333333333e-3,
      1.3888888888888888889e-3,
      1.9841269841269841270e-4,
      2.4801587301587301587e-5,
      2.7557319223985890653e-6,
      2.7557319223985890653e-7,
      2.5052108385441718775e-8,
      2.0876756987868098979e-9,
      1.6059043836821614599e-10,
  };
  __m256d p = _mm256_set1_pd(kInvFact[13]);
  for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[k]));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(n64, 52));
  const __m256d out = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, out);
}

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double HorizontalMax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

double ScalarExp(double x) {
  alignas(32) double buf[4] = {x, 0.0, 0.0, 0.0};
  _mm256_store_pd(buf, Exp4(_mm256_load_pd(buf)));
  return buf[0];
}

double AxpyExpSum(const double* v, const double* w, double a, double shift, double* out_v,
                  double* out_e, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vs = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i));
    const __m256d x1 =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(v + i + 4));
    _mm256_storeu_pd(out_v + i, x0);
    _mm256_storeu_pd(out_v + i + 4, x1);
    const __m256d e0 = Exp4(_mm256_sub_pd(x0, vs));
    const __m256d e1 = Exp4(_mm256_sub_pd(x1, vs));
    _mm256_storeu_pd(out_e + i, e0);
    _mm256_storeu_pd(out_e + i + 4, e1);
    acc0 = _mm256_add_pd(acc0, e0);
    acc1 = _mm256_add_pd(acc1, e1);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double x = std::fma(a, w[i], v[i]);
    out_v[i] = x;
    out_e[i] = ScalarExp(x - shift);
    s += out_e[i];
  }
  return s;
}

double ExpSum(const double* v, double shift, double* out_e, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d e0 = Exp4(_mm256_sub_pd(_mm256_loadu_pd(v + i), vs));
    const __m256d e1 = Exp4(_mm256_sub_pd(_mm256_loadu_pd(v + i + 4), vs));
    _mm256_storeu_pd(out_e + i, e0);
    _mm256_storeu_pd(out_e + i + 4, e1);
    acc0 = _mm256_add_pd(acc0, e0);
    acc1 = _mm256_add_pd(acc1, e1);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    out_e[i] = ScalarExp(v[i] - shift);
    s += out_e[i];
  }
  return s;
}

double Sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double Max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(m);
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    m = HorizontalMax(acc);
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double MaxAbsDiff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double m = HorizontalMax(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

void Axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

}  // namespace

const KernelTable* Avx2Kernels() {
  static const KernelTable table{Isa::kAvx2, "avx2", AxpyExpSum, ExpSum, Sum,
                                 Dot,        Max,    MaxAbsDiff, Axpy};
  return &table;
}

}  // namespace wavedens::kernels

#else

namespace wavedens::kernels {
const KernelTable* Avx2Kernels() { return nullptr; }
}  // namespace wavedens::kernels

#endif
