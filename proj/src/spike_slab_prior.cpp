#include "wavedens/spike_slab_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wavedens {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Z_f = 2 E1(1).
constexpr double kDoubleExpNormalizer = 0.43876786879104055;

double LogErfc(double u) {
  if (u < 25.0) return std::log(std::erfc(u));
  // Asymptotic expansion; relative error below 1e-4 at u = 25.
  const double inv2 = 1.0 / (2.0 * u * u);
  return -u * u - std::log(u * std::sqrt(std::numbers::pi)) +
         std::log1p(-inv2 + 3.0 * inv2 * inv2);
}

std::string Fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string ToString(SlabFamily family) {
  switch (family) {
    case SlabFamily::kDoubleExponential:
      return "default_double_exp";
    case SlabFamily::kLaplace:
      return "laplace";
    case SlabFamily::kGaussian:
      return "gaussian";
    case SlabFamily::kCustomTable:
      return "custom_table";
  }
  return "unknown";
}

SlabFamily SlabFamilyFromString(const std::string& name) {
  if (name == "default_double_exp") return SlabFamily::kDoubleExponential;
  if (name == "laplace") return SlabFamily::kLaplace;
  if (name == "gaussian") return SlabFamily::kGaussian;
  if (name == "custom_table") return SlabFamily::kCustomTable;
  throw std::invalid_argument("unknown slab family \"" + name + "\"");
}

double LogExpIntegralE1(double x) {
  if (!(x > 0.0)) throw std::domain_error("E1 requires x > 0");
  if (x <= 1.0) return std::log(-std::expint(-x));
  // Continued fraction (modified Lentz).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::log(h) - x;
}

double SlabDensity::DoubleExponentialNormalizer() { return kDoubleExpNormalizer; }

SlabDensity SlabDensity::DoubleExponential() { return {}; }

SlabDensity SlabDensity::Laplace() {
  SlabDensity s;
  s.family_ = SlabFamily::kLaplace;
  return s;
}

SlabDensity SlabDensity::Gaussian() {
  SlabDensity s;
  s.family_ = SlabFamily::kGaussian;
  return s;
}

SlabDensity SlabDensity::CustomTable(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw std::invalid_argument("custom slab table needs >= 2 knots and matching values");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0 && !(knots[i] > knots[i - 1])) {
      throw std::invalid_argument("custom slab knots must be strictly increasing");
    }
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("custom slab values must be finite and >= 0");
    }
  }
  SlabDensity s;
  s.family_ = SlabFamily::kCustomTable;
  s.cdf_.assign(knots.size(), 0.0);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    s.cdf_[i] = s.cdf_[i - 1] + 0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
  }
  const double total = s.cdf_.back();
  if (!(total > 0.0)) throw std::invalid_argument("custom slab table has zero mass");
  for (double& v : values) v /= total;
  for (double& c : s.cdf_) c /= total;
  s.knots_ = std::move(knots);
  s.values_ = std::move(values);
  return s;
}

double SlabDensity::LogPdf(double x) const {
  const double a = std::fabs(x);
  switch (family_) {
    case SlabFamily::kDoubleExponential:
      return -std::exp(a) - std::log(kDoubleExpNormalizer);
    case SlabFamily::kLaplace:
      return -a - std::numbers::ln2;
    case SlabFamily::kGaussian:
      return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    case SlabFamily::kCustomTable: {
      if (x < knots_.front() || x > knots_.back()) return kNegInf;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      const std::size_t i = std::min<std::size_t>(it - knots_.begin(), knots_.size() - 1) - 1;
      const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
      const double f = values_[i] + t * (values_[i + 1] - values_[i]);
      return f > 0.0 ? std::log(f) : kNegInf;
    }
  }
  return kNegInf;
}

double SlabDensity::LogTwoSidedTail(double t) const {
  t = std::max(t, 0.0);
  switch (family_) {
    case SlabFamily::kDoubleExponential: {
      const double y = std::exp(t);
      if (!std::isfinite(y)) return kNegInf;
      return std::log(2.0 / kDoubleExpNormalizer) + LogExpIntegralE1(y);
    }
    case SlabFamily::kLaplace:
      return -t;
    case SlabFamily::kGaussian:
      return LogErfc(t / std::numbers::sqrt2);
    case SlabFamily::kCustomTable: {
      auto cdf = [&](double x) {
        if (x <= knots_.front()) return 0.0;
        if (x >= knots_.back()) return 1.0;
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
        const double h = knots_[i + 1] - knots_[i];
        const double d = x - knots_[i];
        return cdf_[i] + values_[i] * d + 0.5 * (values_[i + 1] - values_[i]) / h * d * d;
      };
      const double mass = cdf(-t) + (1.0 - cdf(t));
      return mass > 0.0 ? std::log(mass) : kNegInf;
    }
  }
  return kNegInf;
}

double SlabDensity::Sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
  switch (family_) {
    case SlabFamily::kDoubleExponential: {
      // |Z| = log Y with Y on [1, inf) having density proportional to e^-y / y:
      // propose Y = 1 + Exp(1) and accept with probability 1/Y.
      for (;;) {
        const double y = 1.0 + expo(rng);
        if (unif(rng) * y < 1.0) return sign * std::log(y);
      }
    }
    case SlabFamily::kLaplace:
      return sign * expo(rng);
    case SlabFamily::kGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case SlabFamily::kCustomTable: {
      const double u = unif(rng);
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t i =
          std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1) - 1;
      const double h = knots_[i + 1] - knots_[i];
      const double a = 0.5 * (values_[i + 1] - values_[i]) / h;
      const double b = values_[i];
      const double r = u - cdf_[i];
      const double disc = std::max(b * b + 4.0 * a * r, 0.0);
      const double denom = b + std::sqrt(disc);
      const double d = denom > 0.0 ? 2.0 * r / denom : 0.0;
      return knots_[i] + std::clamp(d, 0.0, h);
    }
  }
  return 0.0;
}

int DefaultTruncationLevel(std::size_t n) {
  if (n <= 1) return 0;
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

bool ConstraintReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConstraintRow& r) { return r.pass; });
}

std::optional<ConstraintRow> ConstraintReport::first_violation() const {
  for (const auto& r : rows) {
    if (!r.pass) return r;
  }
  return std::nullopt;
}

SpikeSlabPrior::SpikeSlabPrior(const PriorSpec& spec, int truncation_level)
    : spec_(spec), jn_(truncation_level) {
  if (jn_ < 0) throw std::invalid_argument("truncation level must be >= 0");
  if (!(spec_.beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
  if (spec_.omega_rule == OmegaRule::kExplicit) {
    if (spec_.omega_explicit.size() < static_cast<std::size_t>(jn_) + 1) {
      throw std::invalid_argument("explicit omega list shorter than J_n + 1");
    }
    for (double w : spec_.omega_explicit) {
      if (!(w >= 0.0 && w < 1.0)) throw std::invalid_argument("omega values must lie in [0,1)");
    }
  } else if (!(spec_.a1 > 0.0) || !(spec_.b1 >= 0.0)) {
    throw std::invalid_argument("a1 must be positive and b1 non-negative");
  }
  switch (spec_.slab_family) {
    case SlabFamily::kDoubleExponential:
      slab_ = SlabDensity::DoubleExponential();
      break;
    case SlabFamily::kLaplace:
      slab_ = SlabDensity::Laplace();
      break;
    case SlabFamily::kGaussian:
      slab_ = SlabDensity::Gaussian();
      break;
    case SlabFamily::kCustomTable:
      slab_ = SlabDensity::CustomTable(spec_.custom_knots, spec_.custom_values);
      break;
  }
}

double SpikeSlabPrior::omega(int j) const {
  if (j < 0 || j > jn_) return 0.0;
  if (spec_.omega_rule == OmegaRule::kExplicit) return spec_.omega_explicit[j];
  return std::min(spec_.a1 * std::exp2(-j * (1.0 + spec_.b1)), std::exp2(-(1.0 + spec_.mu_star)));
}

double SpikeSlabPrior::slab_scale(int j) const { return std::exp2(-j * (spec_.beta0 + 0.5)); }

double SpikeSlabPrior::LogSlab(int j, double value) const {
  const double s = slab_scale(j);
  return slab_.LogPdf(value / s) - std::log(s);
}

double SpikeSlabPrior::SampleSlab(int j, Rng& rng) const { return slab_scale(j) * slab_.Sample(rng); }

bool SpikeSlabPrior::HasSpike(const WaveletIndex& idx) const {
  return !(idx.is_scaling() && spec_.scaling_always_active);
}

std::optional<double> SpikeSlabPrior::LogPriorPoint(const WaveletIndex& idx, double value) const {
  if (idx.j > jn_) return std::nullopt;
  if (!HasSpike(idx)) return LogSlab(idx.j, value);
  const double w = omega(idx.j);
  if (value == 0.0) return std::log1p(-w);
  return std::log(w) + LogSlab(idx.j, value);
}

CoeffVector SpikeSlabPrior::Sample(const WaveletBasis& basis, Rng& rng) const {
  CoeffVector out;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& idx : basis.Enumerate(std::min(jn_, basis.max_level()))) {
    if (HasSpike(idx) && !(unif(rng) < omega(idx.j))) continue;
    double v = 0.0;
    while (v == 0.0) v = SampleSlab(idx.j, rng);
    out.Set(idx, v);
  }
  return out;
}

ConstraintReport SpikeSlabPrior::CheckConstraints(double b2, double x0) const {
  ConstraintReport report;
  const double upper = std::exp2(-(1.0 + spec_.mu_star));
  // The corridor needs some a1 > 0; the configured a1 is capped at the upper bound.
  const double a1_eff = std::min(spec_.a1, upper);
  for (int j = 0; j <= jn_; ++j) {
    const double w = omega(j);
    const std::string params = "j=" + std::to_string(j) + ";omega=" + Fmt(w);
    report.rows.push_back({"omega_upper", params + ";bound=" + Fmt(upper), w - upper,
                           w <= upper * (1.0 + 1e-12)});
    const double lower = a1_eff * std::exp2(-j * (1.0 + spec_.b1));
    report.rows.push_back({"omega_lower", params + ";bound=" + Fmt(lower), lower - w,
                           lower <= w * (1.0 + 1e-12)});
  }
  report.rows.push_back({"mu_star", "mu_star=" + Fmt(spec_.mu_star), 1.0 - spec_.mu_star,
                         spec_.mu_star > 1.0});

  // sup over log-spaced x of b2 x + log P(|Z| > log x), on [x0, 1e4].
  double worst = kNegInf;
  double worst_x = x0;
  constexpr int kScan = 4000;
  const double lx0 = std::log(x0);
  const double lx1 = std::log(1e4);
  for (int i = 0; i <= kScan; ++i) {
    const double x = std::exp(lx0 + (lx1 - lx0) * i / kScan);
    const double v = b2 * x + slab_.LogTwoSidedTail(std::log(x));
    if (v > worst) {
      worst = v;
      worst_x = x;
    }
  }
  report.rows.push_back({"slab_tail",
                         "family=" + ToString(slab_.family()) + ";b2=" + Fmt(b2) + ";x0=" +
                             Fmt(x0) + ";argmax=" + Fmt(worst_x),
                         worst, worst <= 0.0});

  for (double g : {1.0, 5.0, 20.0}) {
    double lo = std::numeric_limits<double>::infinity();
    constexpr int kPoints = 4000;
    for (int i = 0; i <= kPoints; ++i) {
      lo = std::min(lo, slab_.LogPdf(-g + 2.0 * g * i / kPoints));
    }
    report.rows.push_back({"slab_positivity",
                           "family=" + ToString(slab_.family()) + ";G=" + Fmt(g), lo,
                           std::isfinite(lo)});
  }
  return report;
}

}  // namespace wavedens
