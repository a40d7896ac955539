#include <cmath>
#include <limits>

#include "wavedens/kernels.hpp"

namespace wavedens::kernels {
namespace {

double AxpyExpSum(const double* v, const double* w, double a, double shift, double* out_v,
                  double* out_e, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v[i] + a * w[i];
    out_v[i] = x;
    out_e[i] = std::exp(x - shift);
    s += out_e[i];
  }
  return s;
}

double ExpSum(const double* v, double shift, double* out_e, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out_e[i] = std::exp(v[i] - shift);
    s += out_e[i];
  }
  return s;
}

double Sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double Dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double Max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double MaxAbsDiff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

void Axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{Isa::kScalar, "scalar", AxpyExpSum, ExpSum, Sum,
                                 Dot,          Max,      MaxAbsDiff, Axpy};
  return table;
}

}  // namespace wavedens::kernels
