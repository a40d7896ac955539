#include "wavedens/logdensity_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "wavedens/kernels.hpp"

namespace wavedens {
namespace {

// exp(v - shift) must stay representable for every cell.
constexpr double kShiftHeadroom = 600.0;
constexpr double kUnderflowFloor = 1e-250;

}  // namespace

QuadratureGrid QuadratureGrid::ForBasis(const WaveletBasis& basis) {
  QuadratureGrid grid;
  grid.level = basis.resolution();
  const std::size_t n = basis.cell_count();
  const double w = basis.cell_width();
  grid.nodes.resize(n);
  grid.weights.assign(n, w);
  for (std::size_t b = 0; b < n; ++b) grid.nodes[b] = (static_cast<double>(b) + 0.5) * w;
  return grid;
}

double LogPartition(const WaveletBasis& basis, const CoeffVector& theta) {
  std::vector<double> v(basis.cell_count(), 0.0);
  basis.SynthesizeCells(theta, v);
  const double shift = *std::max_element(v.begin(), v.end());
  long double s = 0.0L;
  for (double x : v) s += std::exp(x - shift);
  return std::log(static_cast<double>(s) * basis.cell_width()) + shift;
}

CoeffVector CCoefficients(const WaveletBasis& basis, const CoeffVector& theta) {
  const double log_z = LogPartition(basis, theta);
  CoeffVector c;
  const int j0 = basis.coarse_level();
  for (int k = 0; k < (1 << j0); ++k) {
    const auto idx = WaveletIndex::Scaling(j0, k);
    c.Set(idx, -basis.Integral(idx) * log_z);
  }
  return c;
}

LogDensityModel::LogDensityModel(const WaveletBasis& basis, CoeffVector theta)
    : basis_(&basis), theta_(std::move(theta)), grid_(QuadratureGrid::ForBasis(basis)) {
  for (const auto& [idx, v] : theta_) {
    if (!basis.Contains(idx)) throw std::out_of_range("coefficient index " + idx.ToString());
  }
  Rebuild();
}

void LogDensityModel::Rebuild() {
  const std::size_t n = basis_->cell_count();
  linear_.assign(n, 0.0);
  basis_->SynthesizeCells(theta_, linear_);
  const auto& k = kernels::Active();
  shift_ = k.max(linear_.data(), n);
  expo_.resize(n);
  k.exp_sum(linear_.data(), shift_, expo_.data(), n);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  block_sums_.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    block_sums_[b] = k.sum(expo_.data() + lo, std::min(kBlock, n - lo));
  }
  log_z_ = std::log(TotalFromBlocks(0, {}) * basis_->cell_width()) + shift_;
  pending_.active = false;
}

double LogDensityModel::TotalFromBlocks(std::size_t block_first,
                                        std::span<const double> replaced) const {
  double s = 0.0;
  for (std::size_t b = 0; b < block_sums_.size(); ++b) {
    const bool swap = b >= block_first && b < block_first + replaced.size();
    s += swap ? replaced[b - block_first] : block_sums_[b];
  }
  return s;
}

CoeffVector LogDensityModel::c_coefficients() const {
  CoeffVector c;
  const int j0 = basis_->coarse_level();
  for (int k = 0; k < (1 << j0); ++k) {
    const auto idx = WaveletIndex::Scaling(j0, k);
    c.Set(idx, -basis_->Integral(idx) * log_z_);
  }
  return c;
}

double LogDensityModel::LogDensityAt(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("evaluation point outside [0,1]");
  return LogDensityOnCell(basis_->CellOf(x));
}

double LogDensityModel::DensityAt(double x) const { return std::exp(LogDensityAt(x)); }

std::vector<double> LogDensityModel::LogDensityCells() const {
  std::vector<double> out(linear_);
  for (double& v : out) v -= log_z_;
  return out;
}

double LogDensityModel::Propose(const WaveletIndex& idx, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite coefficient proposal");
  const CellSpan span = basis_->Cells(idx);
  const double delta = value - theta_.Get(idx);
  const auto& k = kernels::Active();
  const std::size_t len = span.values.size();

  Pending& p = pending_;
  p.active = true;
  p.rebuild = false;
  p.idx = idx;
  p.value = value;
  p.first = span.first;
  p.touched = len;
  p.linear.resize(len);
  p.expo.resize(len);
  k.axpy_exp_sum(linear_.data() + span.first, span.values.data(), delta, shift_,
                 p.linear.data(), p.expo.data(), len);
  if (len > 0 && k.max(p.linear.data(), len) - shift_ > kShiftHeadroom) {
    return ProposeSlow(idx, value);
  }

  const std::size_t n = linear_.size();
  p.block_first = span.first / kBlock;
  const std::size_t block_last = len == 0 ? p.block_first : (span.end() - 1) / kBlock;
  p.block_sums.resize(block_last - p.block_first + 1);
  for (std::size_t b = p.block_first; b <= block_last; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n);
    const std::size_t a = std::clamp(span.first, lo, hi);
    const std::size_t z = std::clamp(span.end(), lo, hi);
    p.block_sums[b - p.block_first] = k.sum(expo_.data() + lo, a - lo) +
                                      k.sum(p.expo.data() + (a - span.first), z - a) +
                                      k.sum(expo_.data() + z, hi - z);
  }
  const double total = TotalFromBlocks(p.block_first, p.block_sums);
  if (!(total > kUnderflowFloor)) return ProposeSlow(idx, value);
  p.log_z = std::log(total * basis_->cell_width()) + shift_;
  return p.log_z;
}

double LogDensityModel::ProposeSlow(const WaveletIndex& idx, double value) {
  CoeffVector next = theta_;
  next.Set(idx, value);
  pending_.rebuild = true;
  pending_.log_z = LogPartition(*basis_, next);
  return pending_.log_z;
}

void LogDensityModel::Commit() {
  if (!pending_.active) throw std::logic_error("Commit() without a pending proposal");
  Pending& p = pending_;
  theta_.Set(p.idx, p.value);
  if (p.rebuild) {
    Rebuild();
    return;
  }
  std::copy(p.linear.begin(), p.linear.end(), linear_.begin() + static_cast<std::ptrdiff_t>(p.first));
  std::copy(p.expo.begin(), p.expo.end(), expo_.begin() + static_cast<std::ptrdiff_t>(p.first));
  std::copy(p.block_sums.begin(), p.block_sums.end(),
            block_sums_.begin() + static_cast<std::ptrdiff_t>(p.block_first));
  log_z_ = p.log_z;
  p.active = false;
}

void LogDensityModel::Set(const WaveletIndex& idx, double value) {
  if (!basis_->Contains(idx)) throw std::out_of_range("coefficient index " + idx.ToString());
  Propose(idx, value);
  Commit();
}

void LogDensityModel::Reset(CoeffVector theta) {
  for (const auto& [idx, v] : theta) {
    if (!basis_->Contains(idx)) throw std::out_of_range("coefficient index " + idx.ToString());
  }
  theta_ = std::move(theta);
  Rebuild();
}

void LogDensityModel::WriteSnapshotCsv(std::ostream& out, std::size_t points) const {
  if (points < 2) throw std::invalid_argument("snapshot needs at least 2 points");
  out << "x,lambda,p\n" << std::setprecision(17);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    const double lam = LogDensityAt(x);
    out << x << ',' << lam << ',' << std::exp(lam) << '\n';
  }
}

}  // namespace wavedens
