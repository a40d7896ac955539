#include "wavedens/wavelet_basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "wavedens/kernels.hpp"
#include "wavedens/quadrature.hpp"

namespace wavedens {
namespace {

// Minimum-phase Daubechies lowpass filters, normalized to sum sqrt(2).
constexpr std::array<double, 2> kDb1 = {0.70710678118654752440, 0.70710678118654752440};
constexpr std::array<double, 4> kDb2 = {0.48296291314453414337, 0.83651630373780790558,
                                        0.22414386804201338103, -0.12940952255126038117};
constexpr std::array<double, 6> kDb3 = {0.33267055295008261600,  0.80689150931109257649,
                                        0.45987750211849157010,  -0.13501102001025458870,
                                        -0.08544127388202666169, 0.03522629188570953660};
constexpr std::array<double, 8> kDb4 = {
    0.23037781330889650086,  0.71484657055291564709, 0.63088076792985890788,
    -0.02798376941685985421, -0.18703481171909308408, 0.03084138183556076363,
    0.03288301166688519974,  -0.01059740178506903211};

// Number of interior level-(j+1) translates offered as edge-wavelet candidates.
constexpr int kCandidateWindowPerS = 4;

// Projection leaves rounding residue far from an edge function's core.
constexpr double kRoundingFloor = 1e-14;

struct DenseFn {
  std::size_t first = 0;
  std::vector<double> values;
  std::size_t end() const { return first + values.size(); }
};

// Drops leading and trailing values at or below `floor` (relative to the peak).
void Trim(DenseFn& fn, double floor = 0.0) {
  double peak = 0.0;
  for (double v : fn.values) peak = std::max(peak, std::fabs(v));
  const double cut = floor * peak;
  std::size_t lo = 0;
  std::size_t hi = fn.values.size();
  while (lo < hi && std::fabs(fn.values[lo]) <= cut) ++lo;
  while (hi > lo && std::fabs(fn.values[hi - 1]) <= cut) --hi;
  fn.values = std::vector<double>(fn.values.begin() + static_cast<std::ptrdiff_t>(lo),
                                  fn.values.begin() + static_cast<std::ptrdiff_t>(hi));
  fn.first += lo;
}

}  // namespace

std::span<const double> DaubechiesFilter(int vanishing_moments) {
  switch (vanishing_moments) {
    case 1:
      return kDb1;
    case 2:
      return kDb2;
    case 3:
      return kDb3;
    case 4:
      return kDb4;
    default:
      throw std::invalid_argument("unsupported number of vanishing moments " +
                                  std::to_string(vanishing_moments) + " (supported: 1-4)");
  }
}

void BasisSpec::Validate() const {
  if (vanishing_moments < 1 || vanishing_moments > 4) {
    throw std::invalid_argument("unsupported number of vanishing moments S=" +
                                std::to_string(vanishing_moments) + " (supported: 1-4)");
  }
  if (coarse_level < 0) throw std::invalid_argument("coarse level must be >= 0");
  if (vanishing_moments >= 2 && (1 << coarse_level) < 2 * vanishing_moments) {
    throw std::invalid_argument("coarse level too small: 2^j0 = " +
                                std::to_string(1 << coarse_level) + " < 2S = " +
                                std::to_string(2 * vanishing_moments));
  }
  if (eval_resolution < 10) throw std::invalid_argument("eval_resolution must be >= 10");
  if (eval_resolution > 24) throw std::invalid_argument("eval_resolution must be <= 24");
  if (coarse_level >= eval_resolution) {
    throw std::invalid_argument("coarse level must be below eval_resolution");
  }
}

// Per-level cell representation. Interior functions share one template per
// level; edge functions are stored explicitly.
struct WaveletBasis::Storage {
  struct Level {
    std::size_t stride = 0;  // cells per unit translate: 2^(L-j)
    std::vector<double> scaling_template;
    std::vector<double> wavelet_template;
    std::vector<DenseFn> scaling_left, scaling_right;
    std::vector<DenseFn> wavelet_left, wavelet_right;
  };
  std::vector<Level> levels;  // indexed by j, entries below j0 unused
};

namespace {

class Builder {
 public:
  Builder(const BasisSpec& spec, WaveletBasis::Storage& storage)
      : spec_(spec),
        s_(spec.vanishing_moments),
        res_(spec.eval_resolution),
        cells_(std::size_t{1} << spec.eval_resolution),
        norm_(std::sqrt(static_cast<double>(cells_))),
        h_(DaubechiesFilter(spec.vanishing_moments)),
        storage_(storage) {
    g_.resize(h_.size());
    const int n = static_cast<int>(h_.size());
    for (int i = 0; i < n; ++i) g_[i] = ((i % 2 == 0) ? 1.0 : -1.0) * h_[n - 1 - i];
  }

  void BuildHaar() {
    storage_.levels.resize(res_);
    for (int j = spec_.coarse_level; j < res_; ++j) {
      auto& lvl = storage_.levels[j];
      lvl.stride = cells_ >> j;
      const double amp = std::sqrt(static_cast<double>(std::size_t{1} << j));
      lvl.scaling_template.assign(lvl.stride, amp);
      lvl.wavelet_template.assign(lvl.stride, amp);
      for (std::size_t b = lvl.stride / 2; b < lvl.stride; ++b) lvl.wavelet_template[b] = -amp;
    }
  }

  void BuildDaubechies() {
    storage_.levels.resize(res_);
    for (int j = spec_.coarse_level; j < res_; ++j) BuildScalingLevel(j);
    for (int j = spec_.coarse_level; j < res_; ++j) BuildWaveletLevel(j);
    // Scaling functions above j0 were construction scaffolding only.
    for (int j = spec_.coarse_level + 1; j < res_; ++j) {
      auto& lvl = storage_.levels[j];
      lvl.scaling_template.clear();
      lvl.scaling_template.shrink_to_fit();
      lvl.scaling_left.clear();
      lvl.scaling_right.clear();
    }
  }

 private:
  // Subdivides the coefficient sequence `a` (indices lo..) `depth` times and
  // returns cell values of the resulting function, restricted to [0, 2^L).
  DenseFn Cascade(std::vector<double> a, long lo, int depth, std::span<const double> filter) {
    // First step uses `filter` (h or g); later steps refine with h.
    for (int step = 0; step < depth; ++step) {
      std::span<const double> f = step == 0 ? filter : std::span<const double>(h_);
      std::vector<double> out(2 * (a.size() - 1) + f.size(), 0.0);
      for (std::size_t m = 0; m < a.size(); ++m) {
        if (a[m] == 0.0) continue;
        for (std::size_t i = 0; i < f.size(); ++i) out[2 * m + i] += a[m] * f[i];
      }
      a = std::move(out);
      lo *= 2;
    }
    DenseFn fn;
    const long cells = static_cast<long>(cells_);
    const long begin = std::max(lo, 0L);
    const long end = std::min(lo + static_cast<long>(a.size()), cells);
    if (end <= begin) return fn;
    fn.first = static_cast<std::size_t>(begin);
    fn.values.reserve(static_cast<std::size_t>(end - begin));
    for (long b = begin; b < end; ++b) fn.values.push_back(norm_ * a[b - lo]);
    Trim(fn);
    return fn;
  }

  // Cell values of the level-j translate combination with coefficients `a`
  // at translate indices lo..; depth R - j with h.
  DenseFn ScalingCombination(std::vector<double> a, long lo, int j) {
    return Cascade(std::move(a), lo, res_ - j, h_);
  }

  DenseFn InteriorScaling(int j, long m) {
    const auto& lvl = storage_.levels[j];
    DenseFn fn;
    fn.first = static_cast<std::size_t>(m) * lvl.stride;
    fn.values = lvl.scaling_template;
    return fn;
  }

  DenseFn InteriorWavelet(int j, long m) {
    const auto& lvl = storage_.levels[j];
    DenseFn fn;
    fn.first = static_cast<std::size_t>(m) * lvl.stride;
    fn.values = lvl.wavelet_template;
    return fn;
  }

  DenseFn Box(std::size_t b) {
    DenseFn fn;
    fn.first = b;
    fn.values = {norm_};
    return fn;
  }

  long InteriorCount(int j) const { return (1L << j) - 2L * s_; }

  double Dot(const DenseFn& a, const DenseFn& b) const {
    const std::size_t lo = std::max(a.first, b.first);
    const std::size_t hi = std::min(a.end(), b.end());
    if (hi <= lo) return 0.0;
    const double* pa = a.values.data() + (lo - a.first);
    const double* pb = b.values.data() + (lo - b.first);
    return kernels::ScalarKernels().dot(pa, pb, hi - lo) / static_cast<double>(cells_);
  }

  // a -= c * b, growing a's span as needed.
  static void SubtractScaled(DenseFn& a, double c, const DenseFn& b) {
    if (c == 0.0 || b.values.empty()) return;
    const std::size_t lo = std::min(a.first, b.first);
    const std::size_t hi = std::max(a.end(), b.end());
    if (lo != a.first || hi != a.end()) {
      std::vector<double> grown(hi - lo, 0.0);
      std::copy(a.values.begin(), a.values.end(), grown.begin() + (a.first - lo));
      a.values = std::move(grown);
      a.first = lo;
    }
    double* pa = a.values.data() + (b.first - a.first);
    for (std::size_t i = 0; i < b.values.size(); ++i) pa[i] -= c * b.values[i];
  }

  static void Scale(DenseFn& a, double c) {
    for (double& v : a.values) v *= c;
  }

  void BuildScalingLevel(int j) {
    auto& lvl = storage_.levels[j];
    lvl.stride = cells_ >> j;
    lvl.scaling_template = ScalingCombination({1.0}, 0, j).values;
    const long two_j = 1L << j;
    const long region = 2L * s_ - 1;  // translates in each polynomial region

    std::vector<DenseFn> gens;
    for (int p = 0; p < s_; ++p) {
      std::vector<double> a(region);
      for (long i = 0; i < region; ++i) a[i] = std::pow(static_cast<double>(i - (region - 1)), p);
      gens.push_back(ScalingCombination(std::move(a), -(region - 1), j));
    }
    for (int p = 0; p < s_; ++p) {
      std::vector<double> a(region);
      const long lo = two_j - region;
      for (long i = 0; i < region; ++i) {
        a[i] = std::pow(static_cast<double>(lo + i - two_j), p);
      }
      gens.push_back(ScalingCombination(std::move(a), lo, j));
    }
    Orthonormalize(gens, {});
    lvl.scaling_left.assign(gens.begin(), gens.begin() + s_);
    lvl.scaling_right.assign(gens.begin() + s_, gens.end());
  }

  // Orthonormal family spanning V_j plus the interior wavelets of level j,
  // restricted to members overlapping cells [lo, hi).
  std::vector<DenseFn> FamilyOverlapping(int j, std::size_t lo, std::size_t hi) {
    const auto& lvl = storage_.levels[j];
    std::vector<DenseFn> out;
    auto overlaps = [&](const DenseFn& f) { return f.first < hi && f.end() > lo; };
    for (const auto* group : {&lvl.scaling_left, &lvl.scaling_right}) {
      for (const auto& f : *group) {
        if (overlaps(f)) out.push_back(f);
      }
    }
    const long count = InteriorCount(j);
    const long len = static_cast<long>(std::max(lvl.scaling_template.size(),
                                                lvl.wavelet_template.size()));
    const long stride = static_cast<long>(lvl.stride);
    long m_lo = (static_cast<long>(lo) - len) / stride - 1;
    long m_hi = static_cast<long>(hi) / stride + 1;
    m_lo = std::max(m_lo, 1L);
    m_hi = std::min(m_hi, count);
    for (long m = m_lo; m <= m_hi; ++m) {
      DenseFn phi = InteriorScaling(j, m);
      if (overlaps(phi)) out.push_back(std::move(phi));
      DenseFn psi = InteriorWavelet(j, m);
      if (overlaps(psi)) out.push_back(std::move(psi));
    }
    return out;
  }

  // Removes components along the level-j family, twice for stability.
  void ProjectOut(DenseFn& r, int j) {
    for (int pass = 0; pass < 2; ++pass) {
      const auto family = FamilyOverlapping(j, r.first, r.end());
      for (const auto& f : family) SubtractScaled(r, Dot(r, f), f);
    }
  }

  // Modified Gram-Schmidt (two sweeps) of `fns`, first against the level
  // family when `level` is set.
  void Orthonormalize(std::vector<DenseFn>& fns, std::optional<int> level) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < fns.size(); ++i) {
        if (level) ProjectOut(fns[i], *level);
        for (std::size_t k = 0; k < i; ++k) SubtractScaled(fns[i], Dot(fns[i], fns[k]), fns[k]);
        const double nrm = std::sqrt(Dot(fns[i], fns[i]));
        if (!(nrm > 1e-10)) throw std::runtime_error("basis construction: degenerate edge space");
        Scale(fns[i], 1.0 / nrm);
      }
    }
    for (auto& f : fns) Trim(f, kRoundingFloor);
  }

  std::vector<DenseFn> Candidates(int j, bool left) {
    std::vector<DenseFn> out;
    const int next = j + 1;
    const long window = static_cast<long>(kCandidateWindowPerS) * s_;
    if (next == res_) {
      const std::size_t width = static_cast<std::size_t>(s_ + window);
      for (std::size_t i = 0; i < width; ++i) out.push_back(Box(left ? i : cells_ - 1 - i));
      return out;
    }
    const auto& nl = storage_.levels[next];
    for (const auto& f : left ? nl.scaling_left : nl.scaling_right) out.push_back(f);
    const long count = InteriorCount(next);
    for (long t = 0; t < std::min(window, count); ++t) {
      out.push_back(InteriorScaling(next, left ? 1 + t : count - t));
    }
    return out;
  }

  // Orthonormal basis of the span of `residuals` keeping the `keep` leading
  // directions; fails if the numerical rank differs.
  std::vector<DenseFn> Principal(const std::vector<DenseFn>& residuals, int keep) {
    const int n = static_cast<int>(residuals.size());
    Eigen::MatrixXd gram(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = Dot(residuals[a], residuals[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const auto& vals = eig.eigenvalues();  // ascending
    const double top = vals(n - 1);
    int rank = 0;
    for (int i = 0; i < n; ++i) rank += vals(i) > 1e-9 * top ? 1 : 0;
    if (rank != keep) return {};
    std::vector<DenseFn> out;
    for (int e = n - 1; e >= n - keep; --e) {
      DenseFn fn;
      fn.first = residuals[0].first;
      for (const auto& r : residuals) fn.first = std::min(fn.first, r.first);
      for (int a = 0; a < n; ++a) {
        SubtractScaled(fn, -eig.eigenvectors()(a, e) / std::sqrt(vals(e)), residuals[a]);
      }
      out.push_back(std::move(fn));
    }
    return out;
  }

  static double Centroid(const DenseFn& f) {
    double w = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double v = f.values[i] * f.values[i];
      w += v;
      m += v * static_cast<double>(f.first + i);
    }
    return m / w;
  }

  static void FixSign(DenseFn& f) {
    double best = 0.0;
    for (double v : f.values) {
      if (std::fabs(v) > std::fabs(best)) best = v;
    }
    if (best < 0.0) Scale(f, -1.0);
  }

  void BuildWaveletLevel(int j) {
    auto& lvl = storage_.levels[j];
    // The wavelet template starts at the same cell as the scaling template
    // (both at 2m * 2^(L-j-1)); pad if leading values vanish.
    {
      DenseFn w = Cascade({1.0}, 0, res_ - j, g_);
      std::vector<double> padded(w.first + w.values.size(), 0.0);
      std::copy(w.values.begin(), w.values.end(), padded.begin() + w.first);
      lvl.wavelet_template = std::move(padded);
    }

    auto residuals_for = [&](bool left) {
      std::vector<DenseFn> rs = Candidates(j, left);
      for (auto& r : rs) ProjectOut(r, j);
      return rs;
    };
    std::vector<DenseFn> left_res = residuals_for(true);
    std::vector<DenseFn> right_res = residuals_for(false);

    std::size_t left_hi = 0;
    std::size_t right_lo = cells_;
    for (const auto& r : left_res) left_hi = std::max(left_hi, r.end());
    for (const auto& r : right_res) right_lo = std::min(right_lo, r.first);

    std::vector<DenseFn> left_fns;
    std::vector<DenseFn> right_fns;
    if (left_hi <= right_lo) {
      left_fns = Principal(left_res, s_);
      right_fns = Principal(right_res, s_);
    }
    if (left_fns.empty() || right_fns.empty()) {
      std::vector<DenseFn> all = left_res;
      all.insert(all.end(), right_res.begin(), right_res.end());
      std::vector<DenseFn> both = Principal(all, 2 * s_);
      if (both.empty()) {
        throw std::runtime_error("basis construction: edge wavelet space at level " +
                                 std::to_string(j) + " has unexpected dimension");
      }
      std::stable_sort(both.begin(), both.end(), [](const DenseFn& a, const DenseFn& b) {
        return Centroid(a) < Centroid(b);
      });
      left_fns.assign(both.begin(), both.begin() + s_);
      right_fns.assign(both.begin() + s_, both.end());
    }

    std::vector<DenseFn> edge = left_fns;
    edge.insert(edge.end(), right_fns.begin(), right_fns.end());
    Orthonormalize(edge, j);
    for (auto& f : edge) FixSign(f);
    auto by_centroid = [](const DenseFn& a, const DenseFn& b) {
      return Centroid(a) < Centroid(b);
    };
    lvl.wavelet_left.assign(edge.begin(), edge.begin() + s_);
    lvl.wavelet_right.assign(edge.begin() + s_, edge.end());
    std::stable_sort(lvl.wavelet_left.begin(), lvl.wavelet_left.end(), by_centroid);
    std::stable_sort(lvl.wavelet_right.begin(), lvl.wavelet_right.end(), by_centroid);
  }

  const BasisSpec& spec_;
  int s_;
  int res_;
  std::size_t cells_;
  double norm_;
  std::span<const double> h_;
  std::vector<double> g_;
  WaveletBasis::Storage& storage_;
};

}  // namespace

WaveletBasis::WaveletBasis(const BasisSpec& spec) : spec_(spec) {
  spec_.Validate();
  storage_ = std::make_unique<Storage>();
  Builder builder(spec_, *storage_);
  if (spec_.vanishing_moments == 1) {
    builder.BuildHaar();
  } else {
    builder.BuildDaubechies();
  }
}

WaveletBasis::~WaveletBasis() = default;
WaveletBasis::WaveletBasis(WaveletBasis&&) noexcept = default;
WaveletBasis& WaveletBasis::operator=(WaveletBasis&&) noexcept = default;

std::size_t WaveletBasis::CellOf(double x) const {
  const std::size_t b = static_cast<std::size_t>(x * static_cast<double>(cell_count()));
  return std::min(b, cell_count() - 1);
}

bool WaveletBasis::Contains(const WaveletIndex& idx) const {
  if (idx.k < 0) return false;
  if (idx.is_scaling()) return idx.j == spec_.coarse_level && idx.k < (1 << idx.j);
  return idx.j >= spec_.coarse_level && idx.j <= max_level() && idx.k < (1 << idx.j);
}

std::vector<WaveletIndex> WaveletBasis::Enumerate(int max_lvl) const {
  std::vector<WaveletIndex> out;
  const int top = std::min(max_lvl, max_level());
  if (top < spec_.coarse_level) return out;
  const int j0 = spec_.coarse_level;
  for (int k = 0; k < (1 << j0); ++k) out.push_back(WaveletIndex::Scaling(j0, k));
  for (int j = j0; j <= top; ++j) {
    for (int k = 0; k < (1 << j); ++k) out.push_back(WaveletIndex::Wavelet(j, k));
  }
  return out;
}

std::size_t WaveletBasis::FlatIndex(const WaveletIndex& idx) {
  if (idx.is_scaling()) return static_cast<std::size_t>(idx.k);
  return (std::size_t{1} << idx.j) + static_cast<std::size_t>(idx.k);
}

WaveletIndex WaveletBasis::FromFlat(std::size_t flat) const {
  const int j0 = spec_.coarse_level;
  if (flat < (std::size_t{1} << j0)) return WaveletIndex::Scaling(j0, static_cast<int>(flat));
  int j = 0;
  while ((std::size_t{2} << j) <= flat) ++j;
  return WaveletIndex::Wavelet(j, static_cast<int>(flat - (std::size_t{1} << j)));
}

CellSpan WaveletBasis::Cells(const WaveletIndex& idx) const {
  if (!Contains(idx)) throw std::out_of_range("invalid wavelet index " + idx.ToString());
  const auto& lvl = storage_->levels[idx.j];
  const bool scaling = idx.is_scaling();
  const auto& tmpl = scaling ? lvl.scaling_template : lvl.wavelet_template;
  if (is_haar()) {
    return {static_cast<std::size_t>(idx.k) * lvl.stride, tmpl};
  }
  const int s = spec_.vanishing_moments;
  const int size = 1 << idx.j;
  const auto& left = scaling ? lvl.scaling_left : lvl.wavelet_left;
  const auto& right = scaling ? lvl.scaling_right : lvl.wavelet_right;
  if (idx.k < s) return {left[idx.k].first, left[idx.k].values};
  if (idx.k >= size - s) {
    const auto& f = right[idx.k - (size - s)];
    return {f.first, f.values};
  }
  const std::size_t m = static_cast<std::size_t>(idx.k - s + 1);
  return {m * lvl.stride, tmpl};
}

double WaveletBasis::Evaluate(const WaveletIndex& idx, double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("evaluation point outside [0,1]");
  const CellSpan span = Cells(idx);
  const std::size_t b = CellOf(x);
  if (b < span.first || b >= span.end()) return 0.0;
  return span.values[b - span.first];
}

Interval WaveletBasis::Support(const WaveletIndex& idx) const {
  const CellSpan span = Cells(idx);
  std::size_t lo = span.first;
  std::size_t hi = span.end();
  // Round outward to the 2^-(j+1) grid.
  const std::size_t grid = cell_count() >> std::min(idx.j + 1, resolution());
  lo = (lo / grid) * grid;
  hi = ((hi + grid - 1) / grid) * grid;
  const double w = cell_width();
  return {std::max(0.0, static_cast<double>(lo) * w),
          std::min(1.0, static_cast<double>(hi) * w)};
}

double WaveletBasis::Integral(const WaveletIndex& idx) const {
  const CellSpan span = Cells(idx);
  return kernels::ScalarKernels().sum(span.values.data(), span.values.size()) * cell_width();
}

CoeffVector WaveletBasis::Analyze(const std::function<double(double)>& f, int max_lvl,
                                  double drop_below) const {
  const auto integrals = DyadicCellIntegrals(f, resolution(), 5);
  return AnalyzeCellIntegrals(integrals, max_lvl, drop_below);
}

CoeffVector WaveletBasis::AnalyzeCellIntegrals(std::span<const double> cell_integrals,
                                               int max_lvl, double drop_below) const {
  if (cell_integrals.size() != cell_count()) {
    throw std::invalid_argument("AnalyzeCellIntegrals: expected one integral per cell");
  }
  CoeffVector out;
  const auto& k = kernels::Active();
  for (const auto& idx : Enumerate(max_lvl)) {
    const CellSpan span = Cells(idx);
    const double c = k.dot(span.values.data(), cell_integrals.data() + span.first,
                           span.values.size());
    if (std::fabs(c) > drop_below) out.Set(idx, c);
  }
  return out;
}

double WaveletBasis::Synthesize(const CoeffVector& coeffs, double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("evaluation point outside [0,1]");
  const std::size_t b = CellOf(x);
  double s = 0.0;
  for (const auto& [idx, v] : coeffs) {
    const CellSpan span = Cells(idx);
    if (b >= span.first && b < span.end()) s += v * span.values[b - span.first];
  }
  return s;
}

void WaveletBasis::SynthesizeCells(const CoeffVector& coeffs, std::span<double> out) const {
  if (out.size() != cell_count()) throw std::invalid_argument("SynthesizeCells: size mismatch");
  const auto& k = kernels::Active();
  for (const auto& [idx, v] : coeffs) {
    const CellSpan span = Cells(idx);
    k.axpy(v, span.values.data(), out.data() + span.first, span.values.size());
  }
}

}  // namespace wavedens
