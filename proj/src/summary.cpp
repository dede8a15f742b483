#include "bnpspec/summary.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bnpspec/bernstein.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/quadrature.hpp"

namespace bnpspec {

namespace {

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

}  // namespace

double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.empty() || xs.size() != ys.size()) throw InvalidInput("interpolate: bad grid");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - t) * ys[i - 1] + t * ys[i];
}

PosteriorSummary summarize_posterior(const std::vector<std::vector<double>>& draws,
                                     std::span<const double> draw_grid, std::span<const double> grid,
                                     double level, const std::optional<SpectralFn>& truth) {
  if (draws.size() < kMinSummaryDraws) {
    throw InsufficientSampleError("posterior summary needs at least " +
                                  std::to_string(kMinSummaryDraws) + " retained draws, got " +
                                  std::to_string(draws.size()));
  }
  if (!(level > 0.5 && level < 1.0)) throw InvalidInput("credible level must lie in (0.5, 1)");
  if (grid.empty()) throw InvalidInput("summary grid is empty");
  for (const auto& d : draws) {
    if (d.size() != draw_grid.size()) throw InvalidInput("draw length does not match its grid");
  }

  const std::size_t nd = draws.size();
  const std::size_t ng = grid.size();
  const bool same_grid = std::equal(grid.begin(), grid.end(), draw_grid.begin(), draw_grid.end());
  // values[g * nd + d]
  std::vector<double> values(ng * nd);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t g = 0; g < ng; ++g) {
      values[g * nd + d] = same_grid ? draws[d][g] : interpolate(draw_grid, draws[d], grid[g]);
    }
  }

  PosteriorSummary s;
  s.grid.assign(grid.begin(), grid.end());
  s.level = level;
  s.draws = nd;
  s.median.resize(ng);
  s.mean.resize(ng);
  s.mad.resize(ng);
  s.pointwise.lower.resize(ng);
  s.pointwise.upper.resize(ng);
  const double p_lo = (1.0 - level) / 2.0;
  const double p_hi = (1.0 + level) / 2.0;
  std::vector<double> col(nd);
  for (std::size_t g = 0; g < ng; ++g) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(g * nd), nd, col.begin());
    double sum = 0.0;
    for (double v : col) sum += v;
    s.mean[g] = sum / static_cast<double>(nd);
    std::sort(col.begin(), col.end());
    s.median[g] = quantile_sorted(col, 0.5);
    s.pointwise.lower[g] = quantile_sorted(col, p_lo);
    s.pointwise.upper[g] = quantile_sorted(col, p_hi);
    for (double& v : col) v = std::abs(v - s.median[g]);
    s.mad[g] = median_of(col);
  }

  // Standardized sup deviation per draw. A zero MAD only yields a finite ratio
  // where the draw sits exactly on the median.
  std::vector<double> sup_dev(nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    double m = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      const double dev = std::abs(values[g * nd + d] - s.median[g]);
      if (dev == 0.0) continue;
      m = std::max(m, s.mad[g] > 0.0 ? dev / s.mad[g] : std::numeric_limits<double>::infinity());
    }
    sup_dev[d] = m;
  }
  std::sort(sup_dev.begin(), sup_dev.end());
  const double c = quantile_sorted(sup_dev, level);
  s.uniform_multiplier = c;
  s.uniform.lower.resize(ng);
  s.uniform.upper.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    double lo = s.median[g];
    double hi = s.median[g];
    if (s.mad[g] > 0.0 && std::isfinite(c)) {
      lo -= c * s.mad[g];
      hi += c * s.mad[g];
    } else if (!std::isfinite(c)) {
      // Degenerate MAD somewhere: fall back to the draw envelope.
      const auto first = values.begin() + static_cast<std::ptrdiff_t>(g * nd);
      const auto [mn, mx] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(nd));
      lo = *mn;
      hi = *mx;
    }
    s.uniform.lower[g] = std::min(lo, s.pointwise.lower[g]);
    s.uniform.upper[g] = std::max(hi, s.pointwise.upper[g]);
  }

  if (truth) {
    std::vector<double> t(ng);
    for (std::size_t g = 0; g < ng; ++g) t[g] = (*truth)(grid[g]);
    SummaryMetrics m;
    std::size_t in_pw = 0, in_u = 0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (t[g] >= s.pointwise.lower[g] && t[g] <= s.pointwise.upper[g]) ++in_pw;
      if (t[g] >= s.uniform.lower[g] && t[g] <= s.uniform.upper[g]) ++in_u;
    }
    m.pointwise_coverage = static_cast<double>(in_pw) / static_cast<double>(ng);
    m.uniform_coverage = static_cast<double>(in_u) / static_cast<double>(ng);
    m.pointwise_covers = in_pw == ng;
    m.uniform_covers = in_u == ng;
    if (ng >= 2) {
      const auto [sup, iae] = curve_errors(grid, s.median, *truth);
      m.sup_error = sup;
      m.integrated_abs_error = iae;
    } else {
      m.sup_error = std::abs(s.median[0] - t[0]);
      m.integrated_abs_error = m.sup_error;
    }
    s.truth = std::move(t);
    s.metrics = m;
  }
  return s;
}

PosteriorSummary summarize_posterior(const std::vector<McmcTrace>& traces, std::span<const double> grid,
                                     double level, const std::optional<SpectralFn>& truth) {
  if (traces.empty()) throw InsufficientSampleError("no traces to summarize");
  const auto y = fourier_ordinates(traces.front().n);
  return summarize_posterior(pooled_phi(traces), y, grid, level, truth);
}

double outside_mass(const std::vector<std::vector<double>>& draws, std::span<const double> grid,
                    const SpectralFn& truth, double r) {
  if (draws.empty()) return 0.0;
  std::vector<double> t(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) t[g] = truth(grid[g]);
  std::size_t out = 0;
  for (const auto& d : draws) {
    double sup = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) sup = std::max(sup, std::abs(d[g] - t[g]));
    if (sup >= r) ++out;
  }
  return static_cast<double>(out) / static_cast<double>(draws.size());
}

std::pair<double, double> curve_errors(std::span<const double> grid, std::span<const double> curve,
                                       const SpectralFn& truth) {
  const auto fine = unit_grid(1025);
  std::vector<double> absdiff(fine.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    absdiff[i] = std::abs(interpolate(grid, curve, fine[i]) - truth(fine[i]));
    sup = std::max(sup, absdiff[i]);
  }
  return {sup, simpson_samples(absdiff)};
}

void write_summary_csv(std::ostream& out, const PosteriorSummary& s,
                       const std::optional<std::vector<double>>& periodogram) {
  const bool with_p = periodogram && periodogram->size() == s.grid.size();
  out << "grid,median,mean,pw_lower,pw_upper,unif_lower,unif_upper";
  if (with_p) out << ",periodogram,log_periodogram";
  if (s.truth) out << ",truth";
  out << '\n';
  const auto old = out.precision(12);
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    out << s.grid[g] << ',' << s.median[g] << ',' << s.mean[g] << ',' << s.pointwise.lower[g] << ','
        << s.pointwise.upper[g] << ',' << s.uniform.lower[g] << ',' << s.uniform.upper[g];
    if (with_p) {
      const double p = (*periodogram)[g];
      out << ',' << p << ',';
      if (p > 0.0) out << std::log(p); else out << "nan";
    }
    if (s.truth) out << ',' << (*s.truth)[g];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace bnpspec
