#include "bnpspec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>

#include "bnpspec/bernstein.hpp"
#include "bnpspec/dft.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/kernels.hpp"
#include "bnpspec/likelihood.hpp"
#include "bnpspec/quadrature.hpp"
#include "bnpspec/summary.hpp"
#include "bnpspec/toeplitz.hpp"

namespace bnpspec {

using std::numbers::pi;

namespace {

double sup_distance(const SpectralFn& a, const SpectralFn& b, std::size_t points = 4097) {
  double m = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    m = std::max(m, std::abs(a(x) - b(x)));
  }
  return m;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

std::vector<double> acf_for(const SpectralFn& phi, std::size_t max_lag) {
  if (phi.has_exact_acf()) {
    std::vector<double> g(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) g[k] = phi.exact_acf(k);
    return g;
  }
  return acf_from_spectral(phi, max_lag);
}

}  // namespace

HEvaluation h_functional(const SpectralFn& phi, const SpectralFn& phi0) {
  auto checked = [](const SpectralFn& f, double x, const char* name) {
    const double v = f(x);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("h functional: ") + name + " is not positive at x=" + std::to_string(x));
    }
    return v;
  };
  HEvaluation h;
  h.log_two_pi = std::log(2.0 * pi);
  h.half_log_phi0 = 0.5 * simpson([&](double x) { return std::log(checked(phi0, x, "phi0")); }, 0.0, 1.0);
  h.half_divergence = 0.5 * simpson(
                                [&](double x) {
                                  const double y = checked(phi0, x, "phi0") / checked(phi, x, "phi");
                                  return y - std::log(y);
                                },
                                0.0, 1.0);
  h.value = h.log_two_pi + h.half_log_phi0 + h.half_divergence;
  return h;
}

double h_lipschitz_constant(const ThetaBounds& b) {
  const double r = b.M_bound / b.m;
  return (r + 1.0) * b.M_bound / ((b.m / b.M_bound) * b.m * b.m);
}

double h_sup_bound(const SpectralFn& phi0, const ThetaBounds& b) {
  const double int_log = simpson([&](double x) { return std::log(phi0(x)); }, 0.0, 1.0);
  const double r = b.M_bound / b.m;
  return std::log(2.0 * pi) + 0.5 * std::abs(int_log) + 0.5 * (r + std::log(r));
}

HMinimizerReport h_minimizer_check(const SpectralFn& phi0, const std::vector<SpectralFn>& perturbations,
                                   const ThetaBounds& bounds) {
  HMinimizerReport rep;
  rep.h0 = h_functional(phi0, phi0).value;
  const double lip = h_lipschitz_constant(bounds);
  const double sup_bound = h_sup_bound(phi0, bounds);
  if (std::abs(rep.h0) > sup_bound) ++rep.sup_bound_violations;
  std::vector<double> hv(perturbations.size());
  for (std::size_t i = 0; i < perturbations.size(); ++i) {
    const double d = sup_distance(perturbations[i], phi0);
    if (d < 1e-3) {
      throw InvalidInput("perturbation " + std::to_string(i) + " is within 1e-3 of phi0 in sup norm");
    }
    hv[i] = h_functional(perturbations[i], phi0).value;
    const double gap = hv[i] - rep.h0;
    rep.gaps.push_back(gap);
    if (!(gap > 0.0)) rep.unique_minimum = false;
    if (std::abs(hv[i]) > sup_bound) ++rep.sup_bound_violations;
    const double ratio = std::abs(gap) / (lip * d);
    rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, ratio);
    ++rep.lipschitz_pairs;
    if (ratio > 1.0) ++rep.lipschitz_violations;
  }
  for (std::size_t i = 0; i + 1 < perturbations.size(); ++i) {
    const double d = sup_distance(perturbations[i], perturbations[i + 1]);
    if (d == 0.0) continue;
    const double ratio = std::abs(hv[i] - hv[i + 1]) / (lip * d);
    rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, ratio);
    ++rep.lipschitz_pairs;
    if (ratio > 1.0) ++rep.lipschitz_violations;
  }
  return rep;
}

ThetaBounds truth_theta_bounds(const SpectralFn& phi0) {
  const double mass = simpson([&](double x) { return phi0(x); }, 0.0, 1.0);
  return {0.25 * phi0.grid_min(kCheckGridPoints), 20.0 * mass};
}

std::vector<SpectralFn> bernstein_perturbations(const SpectralFn& phi0, const ThetaBounds& bounds,
                                                std::size_t count, Rng& rng) {
  std::vector<SpectralFn> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count) {
      throw NumericError("could not generate in-Theta perturbations; bounds too tight");
    }
    const auto k = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const double a = 0.05 + 0.45 * uniform01(rng);
    BernsteinWeights w{std::vector<double>(k)};
    double s = 0.0;
    for (double& v : w.w) {
      v = std::gamma_distribution<double>(1.0, 1.0)(rng);
      s += v;
    }
    for (double& v : w.w) v /= s;
    SpectralFn phi(
        SpectralFn::Kind::closed_form,
        [phi0, w, a](double x) { return phi0(x) * (1.0 + a * (bernstein_eval(x, w) - 1.0)); },
        "perturbation");
    if (sup_distance(phi, phi0) < 1e-3) continue;
    if (!theta_membership_grid(phi, bounds).inside) continue;
    out.push_back(std::move(phi));
  }
  return out;
}

std::vector<ConvergenceRow> szego_verify(const SpectralFn& phi, SzegoFunction f,
                                         const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw InvalidInput("szego_verify needs at least one n");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const auto gamma = acf_for(phi, n_max);
  double limit = 0.0;
  if (f == SzegoFunction::log) {
    limit = simpson(
        [&](double x) {
          const double v = phi(x);
          if (!(v > 0.0)) throw DomainError("szego_verify: phi must be positive");
          return std::log(2.0 * pi * v);
        },
        0.0, 1.0);
  } else {
    limit = 2.0 * pi * simpson([&](double x) { return phi(x); }, 0.0, 1.0);
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : n_list) {
    ConvergenceRow r;
    r.n = n;
    if (f == SzegoFunction::log) {
      const ToeplitzMatrix t(gamma, n);
      r.value = t.log_det() / static_cast<double>(n);
    } else {
      r.value = gamma[0];  // trace / n
    }
    r.limit = limit;
    r.error = std::abs(r.value - limit);
    rows.push_back(r);
  }
  return rows;
}

bool convergence_ok(const std::vector<ConvergenceRow>& rows, double tol, double slack) {
  if (rows.empty()) return false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].error > (1.0 + slack) * rows[i - 1].error) return false;
  }
  return rows.back().error < tol;
}

double correction_trace(std::span<const double> phi_ordinates, const WorkingModel& wm_in,
                        std::span<const double> gamma0) {
  const std::size_t n = gamma0.size();
  if (phi_ordinates.size() != ordinate_count(n)) throw InvalidInput("correction_trace: ordinate count");
  const WorkingModel wm = wm_in.n() == n ? wm_in : wm_in.at(n);
  const auto par = wm.phi_par_ordinates();
  std::vector<double> d(n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t j = ordinate_of_row(row, n);
    d[row] = std::sqrt(par[j] / phi_ordinates[j]);
  }

  // F S F' for a symmetric S given column by column: G = F S, then F G'.
  auto conjugate = [n](const std::function<void(std::size_t, std::vector<double>&)>& column) {
    std::vector<double> g(n * n);  // g[i*n + j] = (F S)(i, j)
    std::vector<double> col(n), out(n);
    for (std::size_t j = 0; j < n; ++j) {
      column(j, col);
      real_dft_apply(col, out, DftDirection::forward);
      for (std::size_t i = 0; i < n; ++i) g[i * n + j] = out[i];
    }
    std::vector<double> a(n * n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(i * n), n, row.begin());
      real_dft_apply(row, out, DftDirection::forward);
      for (std::size_t k = 0; k < n; ++k) a[i * n + k] = out[k];
    }
    return a;
  };

  const auto a = conjugate([&](std::size_t j, std::vector<double>& col) {
    for (std::size_t i = 0; i < n; ++i) col[i] = gamma0[i > j ? i - j : j - i];
  });

  double tr = 0.0;
  if (wm.is_white()) {
    const double s2 = wm.gamma_par()[0];
    for (std::size_t k = 0; k < n; ++k) tr += d[k] * d[k] * a[k * n + k];
    return tr / s2;
  }
  const auto& toep = wm.toeplitz();
  const auto b = conjugate([&](std::size_t j, std::vector<double>& col) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    col = toep.solve(e);
  });
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += b[k * n + l] * d[l] * a[l * n + k];
    tr += d[k] * s;
  }
  return tr;
}

std::vector<ConvergenceRow> trace_limit_check(const SpectralFn& phi0, const SpectralFn& phi,
                                              const WorkingModel& wm,
                                              const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw InvalidInput("trace_limit_check needs at least one n");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const auto gamma = acf_for(phi0, n_max);
  const double limit = simpson([&](double x) { return phi0(x) / phi(x); }, 0.0, 1.0);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : n_list) {
    const auto ord = phi.fourier_values(n);
    const double tr = correction_trace(ord, wm.at(n), std::span<const double>(gamma).first(n));
    rows.push_back({n, tr / static_cast<double>(n), limit, std::abs(tr / static_cast<double>(n) - limit)});
  }
  return rows;
}

std::vector<LlnRow> quadratic_form_lln_check(const SeriesGenerator& generator,
                                             const std::function<std::vector<double>(std::size_t)>& true_acf,
                                             const SpectralFn& phi, const WorkingModel& wm,
                                             const std::vector<std::size_t>& n_list, std::size_t replicates,
                                             std::uint64_t seed) {
  std::vector<LlnRow> rows;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::size_t n = n_list[ni];
    const WorkingModel wm_n = wm.at(n);
    const auto ord = phi.fourier_values(n);
    const auto gamma0 = true_acf(n);
    LlnRow row;
    row.n = n;
    const double tr = correction_trace(ord, wm_n, std::span<const double>(gamma0).first(n));
    row.expected = tr / static_cast<double>(n);
    row.deviations.assign(replicates, 0.0);
    std::vector<std::exception_ptr> errors(replicates);
    const auto reps = static_cast<std::ptrdiff_t>(replicates);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < reps; ++r) {
      try {
        const auto idx = static_cast<std::size_t>(r);
        const auto x = generator(n, sub_seed(seed, ni * 1000003ULL + idx));
        const CorrectedWhittle lik(x, wm_n);
        const double q = lik.parts(ord).quadratic_form;
        row.deviations[idx] = (q - tr) / static_cast<double>(n);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    const auto& dv = row.deviations;
    if (!dv.empty()) {
      row.mean_deviation = std::accumulate(dv.begin(), dv.end(), 0.0) / static_cast<double>(dv.size());
      double ss = 0.0;
      for (double v : dv) ss += (v - row.mean_deviation) * (v - row.mean_deviation);
      row.sd_deviation = dv.size() > 1 ? std::sqrt(ss / static_cast<double>(dv.size() - 1)) : 0.0;
      row.iqr_deviation = quantile(dv, 0.75) - quantile(dv, 0.25);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ContractionResult contraction_experiment(const SpectralFn& truth, const SeriesGenerator& generator,
                                         const std::vector<std::size_t>& n_list, std::size_t replicates,
                                         const FitSettings& settings, double radius, std::uint64_t seed) {
  ContractionResult res;
  res.radius = radius;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    for (std::size_t r = 0; r < replicates; ++r) {
      ContractionCell c;
      c.n = n_list[ni];
      c.replicate = r;
      c.seed = sub_seed(seed, ni * replicates + r);
      res.cells.push_back(c);
    }
  }
  const auto cells = static_cast<std::ptrdiff_t>(res.cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    auto& c = res.cells[static_cast<std::size_t>(i)];
    try {
      const auto x = generator(c.n, c.seed);
      FitSettings s = settings;
      s.mcmc.seed = c.seed;
      const auto fit = fit_series(x, s, truth);
      const auto y = fourier_ordinates(c.n);
      c.iae = fit.summary.metrics->integrated_abs_error;
      c.sup_error = fit.summary.metrics->sup_error;
      c.uniform_covers = fit.summary.metrics->uniform_covers;
      c.outside_mass = outside_mass(pooled_phi(fit.traces), y, truth, radius);
      c.seconds = fit.seconds;
      c.ok = true;
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = e.what();
    }
  }
  for (std::size_t n : n_list) {
    ContractionRow row;
    row.n = n;
    std::vector<double> iae, sup, out;
    for (const auto& c : res.cells) {
      if (c.n != n || !c.ok) continue;
      iae.push_back(c.iae);
      sup.push_back(c.sup_error);
      out.push_back(c.outside_mass);
    }
    row.fitted = iae.size();
    row.median_iae = median_of(iae);
    row.median_sup_error = median_of(sup);
    row.median_outside_mass = median_of(out);
    res.rows.push_back(row);
  }
  return res;
}

namespace {

// Random piecewise-linear density on [0,1] with `knots` equal pieces.
struct PiecewiseDensity {
  std::vector<double> v;  // values at knots, normalized to unit mass
  double h = 0.0;

  double operator()(double x) const {
    const double pos = std::clamp(x, 0.0, 1.0) / h;
    const auto i = std::min(static_cast<std::size_t>(pos), v.size() - 2);
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * v[i] + t * v[i + 1];
  }
  double cdf(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    double s = 0.0;
    const auto full = std::min(static_cast<std::size_t>(x / h), v.size() - 1);
    for (std::size_t i = 0; i < full; ++i) s += 0.5 * h * (v[i] + v[i + 1]);
    if (full + 1 < v.size()) {
      const double u = x - h * static_cast<double>(full);
      const double slope = (v[full + 1] - v[full]) / h;
      s += v[full] * u + 0.5 * slope * u * u;
    }
    return s;
  }
  double lipschitz() const {
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) l = std::max(l, std::abs(v[i + 1] - v[i]) / h);
    return l;
  }
  double sup() const { return *std::max_element(v.begin(), v.end()); }
};

PiecewiseDensity random_density(Rng& rng) {
  PiecewiseDensity d;
  const auto knots = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  d.h = 1.0 / static_cast<double>(knots);
  d.v.resize(knots + 1);
  for (double& x : d.v) x = 0.1 + uniform01(rng);
  double mass = 0.0;
  for (std::size_t i = 0; i < knots; ++i) mass += 0.5 * d.h * (d.v[i] + d.v[i + 1]);
  for (double& x : d.v) x /= mass;
  return d;
}

}  // namespace

PropertyReport bernstein_property_sweep(std::size_t cases, std::uint64_t seed) {
  constexpr std::size_t kGrid = 1025;
  const auto grid = unit_grid(kGrid);
  Rng rng(seed);
  // Draw all cases first, then process grouped by k so each basis is built once.
  struct Case {
    std::size_t k;
    bool kantorovich;
    std::uint64_t seed;
  };
  std::vector<Case> all(2 * cases);
  for (std::size_t i = 0; i < cases; ++i) {
    all[2 * i] = {std::uniform_int_distribution<std::size_t>(4, 256)(rng), false, rng()};
    all[2 * i + 1] = {std::uniform_int_distribution<std::size_t>(4, 256)(rng), true, rng()};
  }
  std::map<std::size_t, std::vector<Case>> by_k;
  for (const auto& c : all) by_k[c.k].push_back(c);

  PropertyReport rep;
  rep.cases = all.size();
  std::vector<double> b(kGrid), db(kGrid);
  for (const auto& [k, group] : by_k) {
    const auto basis = kernels::bernstein_basis(grid, k);
    const auto dbasis = kernels::bernstein_basis(grid, k - 1);
    for (std::size_t g = 0; g < kGrid; ++g) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += basis[g * k + j];
      rep.partition_max_error = std::max(rep.partition_max_error, std::abs(s - static_cast<double>(k)));
    }
    for (const auto& c : group) {
      Rng local(c.seed);
      BernsteinWeights w{std::vector<double>(k)};
      std::optional<PiecewiseDensity> f;
      if (c.kantorovich) {
        f = random_density(local);
        w = kantorovich_weights([&](double x) { return f->cdf(x); }, k);
      } else {
        for (double& v : w.w) v = 2.0 * uniform01(local) - 1.0;
      }
      kernels::matvec({basis, kGrid, k}, w.w, b);
      std::vector<double> diff(k - 1);
      for (std::size_t i = 0; i + 1 < k; ++i) diff[i] = w.w[i + 1] - w.w[i];
      kernels::matvec({dbasis, kGrid, k - 1}, diff, db);
      double sup = 0.0, dsup = 0.0;
      for (std::size_t g = 0; g < kGrid; ++g) {
        sup = std::max(sup, std::abs(b[g]));
        dsup = std::max(dsup, static_cast<double>(k) * std::abs(db[g]));
      }
      double wmax = 0.0;
      for (double v : w.w) wmax = std::max(wmax, std::abs(v));
      const double kk = static_cast<double>(k);
      if (sup > kk * wmax * (1.0 + 1e-12)) ++rep.sup_violations;
      if (dsup > 2.0 * kk * kk * wmax * (1.0 + 1e-12) ||
          dsup > bernstein_lipschitz_analytic(w) * (1.0 + 1e-12) + 1e-12)
        ++rep.lipschitz_violations;
      if (c.kantorovich) {
        double err = 0.0;
        for (std::size_t g = 0; g < kGrid; ++g) err = std::max(err, std::abs((*f)(grid[g]) - b[g]));
        const double lf = f->lipschitz();
        const bool approx_ok = err <= 3.0 * lf / std::sqrt(kk) + 1e-12;
        const bool norm_ok = sup <= f->sup() * (1.0 + 1e-12) && dsup <= lf * (1.0 + 1e-9) + 1e-9;
        if (!approx_ok || !norm_ok) ++rep.kantorovich_violations;
      }
    }
  }
  return rep;
}

}  // namespace bnpspec
