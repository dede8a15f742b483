// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 4 9`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "json.hpp"

#include "bnpspec/bernstein.hpp"
#include "bnpspec/cli/commands.hpp"
#include "bnpspec/likelihood.hpp"
#include "bnpspec/quadrature.hpp"
#include "bnpspec/sampler.hpp"
#include "bnpspec/simulate.hpp"
#include "bnpspec/verify.hpp"

using namespace bnpspec;
using std::numbers::pi;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> random_normal(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = standard_normal(rng);
  return x;
}

// Random positive Bernstein density scaled to a random level.
std::vector<double> random_bernstein_ordinates(std::size_t n, Rng& rng) {
  const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * 30);
  BernsteinWeights w;
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    w.w.push_back(0.05 - std::log(uniform01(rng)));
    total += w.w.back();
  }
  for (auto& v : w.w) v /= total;
  const double scale = std::exp(2.0 * uniform01(rng) - 1.0);
  std::vector<double> out;
  for (double y : fourier_ordinates(n)) out.push_back(scale * bernstein_eval(y, w));
  return out;
}

std::vector<double> naive_periodogram(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      const double a = 2.0 * pi * static_cast<double>((j * t) % n) / static_cast<double>(n);
      re += x[t - 1] * std::cos(a);
      im -= x[t - 1] * std::sin(a);
    }
    out[j] = (re * re + im * im) / (2.0 * pi * static_cast<double>(n));
  }
  return out;
}

Eigen::MatrixXd textbook_dft(std::size_t n) {
  Eigen::MatrixXd f(n, n);
  const double dn = static_cast<double>(n);
  for (std::size_t t = 1; t <= n; ++t) f(0, t - 1) = 1.0 / std::sqrt(dn);
  std::size_t row = 1;
  for (std::size_t j = 1; j <= (n - 1) / 2; ++j, row += 2) {
    for (std::size_t t = 1; t <= n; ++t) {
      const double a = 2.0 * pi * static_cast<double>((j * t) % n) / dn;
      f(row, t - 1) = std::sqrt(2.0 / dn) * std::cos(a);
      f(row + 1, t - 1) = std::sqrt(2.0 / dn) * std::sin(a);
    }
  }
  if (n % 2 == 0)
    for (std::size_t t = 1; t <= n; ++t) f(row, t - 1) = (t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(dn);
  return f;
}

std::size_t row_ordinate(std::size_t row, std::size_t n) {
  if (row == 0) return 0;
  if (n % 2 == 0 && row == n - 1) return n / 2;
  return (row + 1) / 2;
}

Eigen::MatrixXd dense_toeplitz(std::span<const double> gamma, std::size_t n) {
  Eigen::MatrixXd t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = gamma[i > j ? i - j : j - i];
  return t;
}

double log_det_spd(const Eigen::MatrixXd& m, Eigen::LLT<Eigen::MatrixXd>& llt) {
  llt.compute(m);
  double ld = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
  return ld;
}

// 1 -------------------------------------------------------------------------
Outcome whittle_reduction() {
  Rng rng(101);
  const std::size_t sizes[] = {17, 64, 256};
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = sizes[c % 3];
    const auto raw = random_normal(n, rng);
    const auto phi = random_bernstein_ordinates(n, rng);
    const double s2 = 0.2 + 2.0 * uniform01(rng);
    const CorrectedWhittle lik(TimeSeries(raw), WorkingModel::white_noise(s2, n));
    const auto pg = naive_periodogram(raw);
    const auto mult = ordinate_multiplicity(n);
    double w = -0.5 * static_cast<double>(n) * std::log(2.0 * pi);
    for (std::size_t j = 0; j < phi.size(); ++j) w -= 0.5 * mult[j] * (std::log(2.0 * pi * phi[j]) + pg[j] / phi[j]);
    worst = std::max(worst, std::abs(lik(phi) - w));
  }
  return {worst < 1e-8, "max |corrected - Whittle| = " + fmt(worst) + " over 100 cases"};
}

// 2 -------------------------------------------------------------------------
Outcome dense_oracle() {
  Rng rng(102);
  const std::size_t sizes[] = {16, 33, 64, 101, 128, 256};
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = sizes[c % 6];
    const auto raw = random_normal(n, rng);
    const auto phi = random_bernstein_ordinates(n, rng);
    const double a1 = 1.2 * uniform01(rng) - 0.6, a2 = 0.6 * uniform01(rng) - 0.3;
    const auto wm = WorkingModel::autoregressive({a1, a2}, 0.3 + uniform01(rng), n);
    const double fast = CorrectedWhittle(TimeSeries(raw), wm)(phi);

    const auto f = textbook_dft(n);
    const auto par = wm.phi_par_ordinates();
    Eigen::VectorXd d(n);
    for (std::size_t r = 0; r < n; ++r) d(r) = std::sqrt(par[row_ordinate(r, n)] / phi[row_ordinate(r, n)]);
    const Eigen::MatrixXd cm = f.transpose() * d.asDiagonal() * f;
    Eigen::LLT<Eigen::MatrixXd> llt;
    const double ld = log_det_spd(dense_toeplitz(wm.gamma_par(), n), llt);
    const Eigen::VectorXd cx = cm * Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(n));
    const double dense = -0.5 * static_cast<double>(n) * std::log(2.0 * pi) +
                         0.5 * (-ld + 2.0 * d.array().log().sum()) - 0.5 * cx.dot(llt.solve(cx));
    worst = std::max(worst, std::abs(fast - dense) / std::abs(dense));
  }
  return {worst < 1e-6, "max relative difference " + fmt(worst) + " over 100 cases, n <= 256"};
}

// 3 -------------------------------------------------------------------------
Outcome working_model_reduction() {
  Rng rng(103);
  double worst = 0.0;
  for (double a : {0.3, 0.7}) {
    for (std::size_t n : {64u, 256u}) {
      const auto raw = random_normal(n, rng);
      const auto wm = WorkingModel::autoregressive({a}, 1.0, n);
      std::vector<double> gamma(n);
      for (std::size_t h = 0; h < n; ++h) gamma[h] = std::pow(a, static_cast<double>(h)) / (1.0 - a * a);
      Eigen::LLT<Eigen::MatrixXd> llt;
      const double ld = log_det_spd(dense_toeplitz(gamma, n), llt);
      const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(n));
      const double exact = -0.5 * static_cast<double>(n) * std::log(2.0 * pi) - 0.5 * ld - 0.5 * xv.dot(llt.solve(xv));
      const std::vector<double> par(wm.phi_par_ordinates().begin(), wm.phi_par_ordinates().end());
      worst = std::max(worst, std::abs(CorrectedWhittle(TimeSeries(raw), wm)(par) - exact));
    }
  }
  return {worst < 1e-9, "max |ln f - Gaussian| = " + fmt(worst) + " for AR(1) 0.3, 0.7 and n = 64, 256"};
}

// 4 -------------------------------------------------------------------------
Outcome acf_values() {
  const auto g = acf_from_spectral(SpectralFn::lipschitz_example(), 21);
  double worst = std::abs(g[0] - 2.0 * pi * pi);
  for (std::size_t h = 1; h <= 21; ++h) {
    const double expected = h % 2 == 0 ? 0.0 : -4.0 / static_cast<double>(h * h);
    worst = std::max(worst, std::abs(g[h] - expected));
  }
  return {worst < 1e-6, "max error " + fmt(worst) + " for lags 0..21"};
}

// 5 -------------------------------------------------------------------------
Outcome cantor_law() {
  Rng rng(105);
  const std::size_t draws = 1000000;
  double s = 0.0, ss = 0.0;
  std::size_t gap = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double e = cantor_draw(rng);
    s += e;
    ss += e * e;
    if (e > -1.0 / 6.0 && e < 1.0 / 6.0) ++gap;
  }
  const double mean = s / draws, var = ss / draws - mean * mean;
  return {std::abs(mean) < 0.001 && std::abs(var - 0.125) < 0.002 && gap == 0,
          "mean " + fmt(mean) + ", variance " + fmt(var) + ", draws in (-1/6,1/6): " + std::to_string(gap)};
}

// 6 -------------------------------------------------------------------------
Outcome szego() {
  const auto rows = szego_verify(preset_truth(Preset::cantor_ma1), SzegoFunction::log, {128, 512, 1024});
  std::string d = "errors";
  for (const auto& r : rows) d += " n=" + std::to_string(r.n) + ":" + fmt(r.error);
  return {convergence_ok(rows, 0.02), d};
}

// 7 -------------------------------------------------------------------------
Outcome properties() {
  const auto r = bernstein_property_sweep(10000, 107);
  return {r.passed(), std::to_string(r.cases) + " cases; violations sup " + std::to_string(r.sup_violations) +
                          ", Lipschitz " + std::to_string(r.lipschitz_violations) + ", Kantorovich " +
                          std::to_string(r.kantorovich_violations) + "; partition error " +
                          fmt(r.partition_max_error)};
}

// 8 -------------------------------------------------------------------------
Outcome h_checks() {
  const auto white = SpectralFn::constant(1.0 / (2.0 * pi));
  const double hw = h_functional(white, white).value;
  const double err = std::abs(hw - (0.5 * std::log(2.0 * pi) + 0.5));
  bool ok = err < 1e-8;
  std::string d = "h(1/2pi) error " + fmt(err);
  Rng rng(108);
  for (Preset p : {Preset::cantor_ma1, Preset::lipschitz_gauss}) {
    const auto phi0 = preset_truth(p);
    const auto bounds = truth_theta_bounds(phi0);
    const auto pert = bernstein_perturbations(phi0, bounds, 50, rng);
    const auto rep = h_minimizer_check(phi0, pert, bounds);
    double min_gap = 1e300;
    for (double g : rep.gaps) min_gap = std::min(min_gap, g);
    ok = ok && rep.passed() && rep.gaps.size() == 50;
    d += "; " + preset_name(p) + ": min gap " + fmt(min_gap) + ", Lipschitz " +
         std::to_string(rep.lipschitz_violations) + "/" + std::to_string(rep.lipschitz_pairs) + " violated";
  }
  return {ok, d};
}

// 9 -------------------------------------------------------------------------
Outcome prior_recovery() {
  Rng rng(109);
  const TimeSeries x(random_normal(64, rng));
  PriorHyper h;
  h.truncation = 5;
  const PosteriorProblem problem(x, WorkingModel::white_noise(1.0, 64), h, ThetaBounds::unrestricted(), 0.0);
  McmcConfig cfg;
  cfg.stub_likelihood = true;
  cfg.store_phi = false;
  cfg.k_jump = 10;
  cfg.thin = 20;
  cfg.burn_in = 1000;
  cfg.n_iter = cfg.burn_in + 100000 * cfg.thin;
  const auto tr = run_chain(problem, cfg, 109);
  std::vector<double> hist(h.k_max + 1, 0.0);
  for (const auto& s : tr.states) hist[s.k] += 1.0;
  double tv = 0.0;
  for (std::size_t k = 1; k <= h.k_max; ++k)
    tv += 0.5 * std::abs(hist[k] / static_cast<double>(tr.size()) - std::exp(log_rho(k, h)));
  return {tv < 0.02 && tr.size() == 100000, "TV " + fmt(tv) + " over " + std::to_string(tr.size()) + " draws"};
}

// 10 ------------------------------------------------------------------------
Outcome contraction() {
  const auto truth = preset_truth(Preset::cantor_ma1);
  const SeriesGenerator gen = [](std::size_t n, std::uint64_t s) {
    return simulate_preset(Preset::cantor_ma1, n, s);
  };
  const double radius = 0.5 * truth.grid_max(4097);
  const auto res = contraction_experiment(truth, gen, {128, 256, 512}, 10, FitSettings{}, radius, 110);
  bool ok = res.rows.size() == 3;
  std::string d = "median IAE";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    d += " n=" + std::to_string(r.n) + ":" + fmt(r.median_iae) + "(" + std::to_string(r.fitted) + ")";
    ok = ok && r.fitted == 10;
    if (i > 0) ok = ok && r.median_iae < res.rows[i - 1].median_iae;
  }
  const double mass = res.rows.empty() ? 1.0 : res.rows.back().median_outside_mass;
  ok = ok && mass < 0.1;
  d += "; outside mass at n=512: " + fmt(mass);
  return {ok, d};
}

// 11 ------------------------------------------------------------------------
Outcome end_to_end() {
  const auto root = std::filesystem::temp_directory_path() / ("bnpspec_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  std::ostringstream log;
  int covered = 0, completed = 0;
  double slowest = 0.0;
  for (int r = 0; r < 10; ++r) {
    const auto dir = root / ("rep" + std::to_string(r));
    cli::RunConfig sim;
    sim.seed = 1000 + r;
    sim.preset = "cantor-ma1";
    sim.n = 256;
    sim.output = (dir / "sim").string();
    if (cli::run_guarded([&] { return cli::cmd_simulate(sim, log); }, log) != 0) continue;

    cli::RunConfig fit;
    fit.seed = 2000 + r;
    fit.input = (dir / "sim" / "series.csv").string();
    fit.truth = "cantor-ma1";
    fit.output = (dir / "fit").string();
    const auto t0 = std::chrono::steady_clock::now();
    if (cli::run_guarded([&] { return cli::cmd_fit(fit, log); }, log) != 0) continue;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    if (secs >= 600.0) continue;
    ++completed;
    std::ifstream f(dir / "fit" / "diagnostics.json");
    const auto diag = nlohmann::json::parse(f);
    if (diag["metrics"]["uniform_covers"].get<bool>()) ++covered;
  }
  std::filesystem::remove_all(root);
  return {completed == 10 && covered >= 7, std::to_string(covered) + "/10 uniform bands contain the truth; " +
                                               std::to_string(completed) + " fits completed, slowest " +
                                               fmt(slowest) + " s"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Whittle reduction", 10.0, whittle_reduction},
      {2, "dense-oracle equivalence", 120.0, dense_oracle},
      {3, "working-model reduction", 0.0, working_model_reduction},
      {4, "ACF of pi|x|+pi/2", 0.0, acf_values},
      {5, "Cantor law", 0.0, cantor_law},
      {6, "Szego verification", 60.0, szego},
      {7, "Bernstein property suite", 0.0, properties},
      {8, "h functional", 0.0, h_checks},
      {9, "sampler prior recovery", 0.0, prior_recovery},
      {10, "desk-scale contraction", 3600.0, contraction},
      {11, "end-to-end fit coverage", 0.0, end_to_end},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
      o.passed = false;
      o.detail += "; runtime limit " + fmt(c.limit_seconds) + " s exceeded";
    }
    if (!o.passed) ++failures;
    std::printf("%s  [%2d] %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
