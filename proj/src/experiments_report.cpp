#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "wavedens/experiments.hpp"

namespace wavedens {
namespace {

double LogRateAxis(double n) { return std::log(std::log(n) / n); }

void OpenOrThrow(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(10);
}

}  // namespace

RateFit FitRate(const std::vector<std::pair<double, double>>& points, double beta) {
  std::set<double> distinct;
  for (const auto& [n, y] : points) {
    if (!(y > 0.0)) throw std::invalid_argument("rate fit needs positive errors");
    if (!(n > 1.0)) throw std::invalid_argument("rate fit needs n > 1");
    distinct.insert(n);
  }
  if (distinct.size() < 4) throw std::invalid_argument("rate fit needs at least 4 distinct n");
  const double m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, y] : points) {
    sx += LogRateAxis(n);
    sy += std::log(y);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, y] : points) {
    const double dx = LogRateAxis(n) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.points = points.size();
  fit.target = beta / (2.0 * beta + 1.0);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (const auto& [n, y] : points) {
    const double r = std::log(y) - fit.intercept - fit.slope * LogRateAxis(n);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.std_error = points.size() > 2 ? std::sqrt(sse / (m - 2.0) / sxx) : 0.0;
  return fit;
}

std::vector<std::pair<double, double>> MedianErrors(const std::vector<ResultRow>& rows,
                                                    bool log_adjusted) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : rows) by_n[r.n].push_back(r.med_sup_err);
  std::vector<std::pair<double, double>> out;
  for (auto& [n, errs] : by_n) {
    std::sort(errs.begin(), errs.end());
    const std::size_t h = errs.size() / 2;
    double med = errs.size() % 2 ? errs[h] : 0.5 * (errs[h - 1] + errs[h]);
    const double nd = static_cast<double>(n);
    if (log_adjusted) med /= std::log(nd);
    out.emplace_back(nd, med);
  }
  return out;
}

void WriteResultsCsv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "n,replicate,med_sup_err,mass_M1,mass_M2,mass_M4,mass_M8,frac_empty_partition,seconds\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.replicate << ',' << r.med_sup_err << ',' << r.mass[0] << ','
        << r.mass[1] << ',' << r.mass[2] << ',' << r.mass[3] << ',' << r.frac_empty_partition
        << ',' << r.seconds << '\n';
  }
}

void WriteDiagnosticsCsv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "n,replicate,median_curve_sup_err,med_l2_dist,med_mixed_dist,rw_rate,toggle_rate\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.replicate << ',' << r.median_curve_sup_err << ',' << r.med_l2_dist
        << ',' << r.med_mixed_dist << ',' << r.rw_rate << ',' << r.toggle_rate << '\n';
  }
}

void WriteRatesCsv(std::ostream& out, const RateFit& raw, const RateFit& log_adjusted) {
  out << "fit,slope,intercept,std_error,r_squared,target_exponent,points\n";
  auto row = [&](const char* name, const RateFit& f) {
    out << name << ',' << f.slope << ',' << f.intercept << ',' << f.std_error << ','
        << f.r_squared << ',' << f.target << ',' << f.points << '\n';
  };
  row("raw", raw);
  row("log_adjusted", log_adjusted);
}

void WriteRateSvg(std::ostream& out, const std::vector<ResultRow>& rows, const RateFit& fit) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
  const auto medians = MedianErrors(rows, false);
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& r : rows) {
    if (!(r.med_sup_err > 0.0)) continue;
    xlo = std::min(xlo, std::log10(static_cast<double>(r.n)));
    xhi = std::max(xhi, std::log10(static_cast<double>(r.n)));
    ylo = std::min(ylo, std::log10(r.med_sup_err));
    yhi = std::max(yhi, std::log10(r.med_sup_err));
  }
  if (xlo > xhi) xlo = 0.0, xhi = 1.0, ylo = -1.0, yhi = 0.0;
  xlo -= 0.05; xhi += 0.05;
  ylo = std::floor(ylo * 10.0 - 1.0) / 10.0;
  yhi = std::ceil(yhi * 10.0 + 1.0) / 10.0;
  auto px = [&](double lx) { return kLeft + (lx - xlo) / (xhi - xlo) * (kW - kLeft - kRight); };
  auto py = [&](double ly) { return kH - kBottom - (ly - ylo) / (yhi - ylo) * (kH - kTop - kBottom); };

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (const auto& [n, e] : medians) {
    const double x = px(std::log10(n));
    out << "<text x=\"" << x << "\" y=\"" << kH - kBottom + 16 << "\" text-anchor=\"middle\">"
        << static_cast<long long>(n) << "</text>\n";
  }
  for (double ly = std::ceil(ylo * 2.0) / 2.0; ly <= yhi; ly += 0.5) {
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(ly) + 4 << "\" text-anchor=\"end\">1e"
        << std::setprecision(1) << ly << std::setprecision(2) << "</text>\n";
  }
  out << "<text x=\"" << (kW + kLeft) / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">n (log scale)</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + (kH - kTop - kBottom) / 2
      << "\" transform=\"rotate(-90 16 " << kTop + (kH - kTop - kBottom) / 2
      << ")\" text-anchor=\"middle\">median sup-norm error</text>\n";

  for (const auto& r : rows) {
    if (!(r.med_sup_err > 0.0)) continue;
    out << "<circle cx=\"" << px(std::log10(static_cast<double>(r.n))) << "\" cy=\""
        << py(std::log10(r.med_sup_err)) << "\" r=\"2.5\" fill=\"#999999\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (const auto& [n, e] : medians) out << px(std::log10(n)) << ',' << py(std::log10(e)) << ' ';
  out << "\"/>\n";

  // Guide line with the minimax exponent through the mean of the medians.
  if (!medians.empty()) {
    double mx = 0.0, my = 0.0;
    for (const auto& [n, e] : medians) {
      mx += LogRateAxis(n);
      my += std::log(e);
    }
    mx /= static_cast<double>(medians.size());
    my /= static_cast<double>(medians.size());
    out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"6 4\" points=\"";
    for (const auto& [n, e] : medians) {
      const double guide = my + fit.target * (LogRateAxis(n) - mx);
      out << px(std::log10(n)) << ',' << py(guide / std::log(10.0)) << ' ';
    }
    out << "\"/>\n";
  }
  out << std::setprecision(3);
  out << "<text x=\"" << kW - kRight - 4 << "\" y=\"" << kTop
      << "\" text-anchor=\"end\">fitted slope " << fit.slope << ", minimax exponent "
      << fit.target << "</text>\n";
  out << "</svg>\n";
}

ExperimentOutcome RunExperiment(const ExperimentConfig& config, unsigned jobs) {
  config.Validate();
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);

  // One basis and truth per distinct resolution, shared read-only by the workers.
  std::map<int, std::unique_ptr<WaveletBasis>> bases;
  std::map<int, std::unique_ptr<LogDensityModel>> truths;
  for (std::size_t n : config.n_grid) {
    const BasisSpec spec = config.BasisFor(n);
    if (bases.count(spec.eval_resolution)) continue;
    auto basis = std::make_unique<WaveletBasis>(spec);
    truths[spec.eval_resolution] =
        std::make_unique<LogDensityModel>(MakeTruth(config.truth, *basis));
    bases[spec.eval_resolution] = std::move(basis);
  }

  std::vector<std::pair<std::size_t, int>> cells;
  for (std::size_t n : config.n_grid) {
    for (int r = 0; r < config.replicates; ++r) cells.emplace_back(n, r);
  }
  std::vector<ResultRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::map<std::size_t, PosteriorSummary> bands;
  std::mutex band_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto [n, rep] = cells[i];
      try {
        const int res = config.BasisFor(n).eval_resolution;
        PosteriorSummary band;
        rows[i] = RunCell(config, *bases.at(res), *truths.at(res), n, rep,
                          rep == 0 ? &band : nullptr);
        if (rep == 0) {
          std::lock_guard<std::mutex> lock(band_mutex);
          bands[n] = std::move(band);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw std::runtime_error("cell n=" + std::to_string(cells[i].first) +
                             ", replicate=" + std::to_string(cells[i].second) + ": " + what);
  }

  ExperimentOutcome outcome;
  outcome.rows = std::move(rows);
  outcome.raw = FitRate(MedianErrors(outcome.rows, false), config.truth.beta);
  outcome.log_adjusted = FitRate(MedianErrors(outcome.rows, true), config.truth.beta);

  std::ofstream out;
  OpenOrThrow(out, dir / "results.csv");
  WriteResultsCsv(out, outcome.rows);
  out.close();
  OpenOrThrow(out, dir / "diagnostics.csv");
  WriteDiagnosticsCsv(out, outcome.rows);
  out.close();
  OpenOrThrow(out, dir / "rates.csv");
  WriteRatesCsv(out, outcome.raw, outcome.log_adjusted);
  out.close();
  OpenOrThrow(out, dir / "plot_rate.svg");
  WriteRateSvg(out, outcome.rows, outcome.raw);
  out.close();
  for (const auto& [n, band] : bands) {
    OpenOrThrow(out, dir / ("posterior_band_" + std::to_string(n) + ".csv"));
    band.WriteBandCsv(out, true);
    out.close();
  }
  return outcome;
}

}  // namespace wavedens
