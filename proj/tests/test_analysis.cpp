#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "bnpspec/errors.hpp"
#include "bnpspec/quadrature.hpp"
#include "bnpspec/simulate.hpp"
#include "bnpspec/summary.hpp"
#include "bnpspec/verify.hpp"

using namespace bnpspec;
using std::numbers::pi;

namespace {

Eigen::MatrixXd textbook_dft(std::size_t n) {
  Eigen::MatrixXd f(n, n);
  const double dn = static_cast<double>(n);
  for (std::size_t t = 1; t <= n; ++t) f(0, t - 1) = 1.0 / std::sqrt(dn);
  std::size_t row = 1;
  for (std::size_t j = 1; j <= (n - 1) / 2; ++j, row += 2) {
    for (std::size_t t = 1; t <= n; ++t) {
      const double a = 2.0 * pi * static_cast<double>(j * t) / dn;
      f(row, t - 1) = std::sqrt(2.0 / dn) * std::cos(a);
      f(row + 1, t - 1) = std::sqrt(2.0 / dn) * std::sin(a);
    }
  }
  if (n % 2 == 0)
    for (std::size_t t = 1; t <= n; ++t) f(row, t - 1) = (t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(dn);
  return f;
}

Eigen::MatrixXd dense_toeplitz(std::span<const double> gamma, std::size_t n) {
  Eigen::MatrixXd t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = gamma[i > j ? i - j : j - i];
  return t;
}

std::vector<std::vector<double>> repeat(const std::vector<double>& row, std::size_t count) {
  return std::vector<std::vector<double>>(count, row);
}

}  // namespace

TEST_CASE("summary of identical draws collapses") {
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> row = {1.0, 1.2, 0.9, 1.1, 1.0};
  const auto truth = SpectralFn::constant(1.0);
  const auto s = summarize_posterior(repeat(row, 150), grid, grid, 0.9, truth);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.median[i] == row[i]);
    CHECK(s.pointwise.lower[i] == row[i]);
    CHECK(s.pointwise.upper[i] == row[i]);
    CHECK(s.uniform.lower[i] == row[i]);
    CHECK(s.uniform.upper[i] == row[i]);
  }
  REQUIRE(s.metrics);
  CHECK(s.metrics->sup_error == doctest::Approx(0.2));

  CHECK_THROWS_AS(summarize_posterior(repeat(row, 99), grid, grid, 0.9), InsufficientSampleError);
  CHECK_THROWS_AS(summarize_posterior(repeat(row, 150), grid, grid, 0.4), InvalidInput);
}

TEST_CASE("pointwise band coverage on synthetic draws") {
  const std::size_t points = 65;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  const auto curve = [](double x) { return 1.0 + 0.5 * std::sin(2.0 * pi * x); };
  const SpectralFn truth(SpectralFn::Kind::closed_form, curve);
  Rng rng(51);
  double coverage = 0.0;
  const int replicates = 50;
  for (int r = 0; r < replicates; ++r) {
    std::vector<double> centre(points);
    for (std::size_t i = 0; i < points; ++i) centre[i] = curve(grid[i]) + 0.1 * standard_normal(rng);
    std::vector<std::vector<double>> draws(2000, std::vector<double>(points));
    for (auto& d : draws)
      for (std::size_t i = 0; i < points; ++i) d[i] = centre[i] + 0.1 * standard_normal(rng);
    const auto s = summarize_posterior(draws, grid, grid, 0.9, truth);
    coverage += s.metrics->pointwise_coverage / replicates;
    for (std::size_t i = 0; i < points; ++i) {
      CHECK(s.uniform.lower[i] <= s.pointwise.lower[i]);
      CHECK(s.uniform.upper[i] >= s.pointwise.upper[i]);
    }
    CHECK(s.uniform_multiplier > 1.645);
  }
  CHECK(std::abs(coverage - 0.9) < 0.03);
}

TEST_CASE("summary helpers") {
  const std::vector<double> xs = {0.0, 0.5, 1.0}, ys = {1.0, 3.0, 2.0};
  CHECK(interpolate(xs, ys, 0.25) == doctest::Approx(2.0));
  CHECK(interpolate(xs, ys, -1.0) == 1.0);
  CHECK(interpolate(xs, ys, 2.0) == 2.0);

  const auto truth = SpectralFn::constant(1.0);
  std::vector<std::vector<double>> draws = {{1.0, 1.0, 1.0}, {1.0, 1.6, 1.0}, {0.5, 1.0, 1.0}, {1.1, 1.1, 1.1}};
  CHECK(outside_mass(draws, xs, truth, 0.5) == doctest::Approx(0.5));
  CHECK(outside_mass(draws, xs, truth, 10.0) == 0.0);

  const auto [sup, iae] = curve_errors(xs, std::vector<double>{2.0, 2.0, 2.0}, truth);
  CHECK(sup == doctest::Approx(1.0));
  CHECK(iae == doctest::Approx(1.0));

  std::stringstream ss;
  const auto s = summarize_posterior(repeat({1.0, 2.0, 3.0}, 100), xs, xs, 0.9, truth);
  write_summary_csv(ss, s, std::vector<double>{0.0, 0.5, 2.0});
  std::string header;
  std::getline(ss, header);
  CHECK(header == "grid,median,mean,pw_lower,pw_upper,unif_lower,unif_upper,periodogram,log_periodogram,truth");
  std::string first;
  std::getline(ss, first);
  CHECK(first.find("nan") != std::string::npos);
}

TEST_CASE("h functional values") {
  const auto white = SpectralFn::constant(1.0 / (2.0 * pi));
  const auto h = h_functional(white, white);
  CHECK(std::abs(h.value - (0.5 * std::log(2.0 * pi) + 0.5)) < 1e-8);
  CHECK(h.value == doctest::Approx(1.4189).epsilon(1e-4));
  CHECK(h.half_divergence == doctest::Approx(0.5).epsilon(1e-14));

  const auto lip = SpectralFn::lipschitz_example();
  const auto twice = SpectralFn(SpectralFn::Kind::closed_form, [&](double x) { return 2.0 * lip(x); });
  const auto h2 = h_functional(twice, lip);
  CHECK(h2.half_divergence == doctest::Approx(0.25 + 0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(h2.half_divergence == doctest::Approx(0.5966).epsilon(1e-4));

  const double h0 = h_functional(lip, lip).value;
  for (double c : {0.5, 2.0}) {
    const SpectralFn scaled(SpectralFn::Kind::closed_form, [&, c](double x) { return c * lip(x); });
    const double gap = h_functional(scaled, lip).value - h0;
    CHECK(gap == doctest::Approx(0.5 * (1.0 / c - std::log(1.0 / c) - 1.0)).epsilon(1e-10));
    CHECK(gap > 0.0);
  }
  CHECK_THROWS_AS(h_functional(SpectralFn::constant(-1.0), lip), DomainError);
}

TEST_CASE("h constants and minimizer check") {
  const ThetaBounds b{0.5, 2.0};
  CHECK(h_lipschitz_constant(b) == doctest::Approx(160.0));
  const auto one = SpectralFn::constant(1.0);
  CHECK(h_sup_bound(one, b) == doctest::Approx(std::log(2.0 * pi) + 0.5 * (4.0 + std::log(4.0))));

  for (Preset p : {Preset::lipschitz_gauss, Preset::cantor_ma1}) {
    const auto phi0 = preset_truth(p);
    const auto bounds = truth_theta_bounds(phi0);
    CHECK(bounds.m == doctest::Approx(0.25 * phi0.grid_min(257)));
    Rng rng(52);
    const auto pert = bernstein_perturbations(phi0, bounds, 20, rng);
    REQUIRE(pert.size() == 20);
    for (const auto& f : pert) CHECK(theta_membership_grid(f, bounds).inside);
    const auto rep = h_minimizer_check(phi0, pert, bounds);
    CHECK(rep.passed());
    CHECK(rep.gaps.size() == 20);
    CHECK(rep.lipschitz_pairs >= 39);
    CHECK(rep.max_lipschitz_ratio <= 1.0);
    CHECK_THROWS_AS(h_minimizer_check(phi0, std::vector<SpectralFn>{phi0}, bounds), InvalidInput);
  }
}

TEST_CASE("Szego limits") {
  const auto c = SpectralFn::constant(3.0 / (2.0 * pi));
  for (const auto& r : szego_verify(c, SzegoFunction::log, {8, 64}))
    CHECK(std::abs(r.value - std::log(3.0)) < 1e-12);
  for (const auto& r : szego_verify(c, SzegoFunction::identity, {8, 64})) CHECK(std::abs(r.value - 3.0) < 1e-12);

  const auto ma = preset_truth(Preset::cantor_ma1);
  const auto rows = szego_verify(ma, SzegoFunction::log, {128, 512, 1024});
  CHECK(rows.back().limit == doctest::Approx(std::log(0.125)).epsilon(1e-8));
  CHECK(rows.back().error < 0.02);
  CHECK(convergence_ok(rows, 0.02));

  const std::vector<ConvergenceRow> growing = {{8, 0, 0, 0.1}, {16, 0, 0, 0.2}};
  CHECK_FALSE(convergence_ok(growing, 1.0));
  const std::vector<ConvergenceRow> slack = {{8, 0, 0, 0.1}, {16, 0, 0, 0.105}};
  CHECK(convergence_ok(slack, 1.0));
}

TEST_CASE("correction trace matches the dense product") {
  Rng rng(53);
  const auto gamma0 = preset_acf(Preset::cantor_ma1, 47);
  for (std::size_t n : {15u, 48u}) {
    const std::vector<double> g(gamma0.begin(), gamma0.begin() + static_cast<std::ptrdiff_t>(n));
    for (bool white : {true, false}) {
      const auto wm = white ? WorkingModel::white_noise(0.2, n) : WorkingModel::autoregressive({0.4}, 0.1, n);
      std::vector<double> phi(ordinate_count(n));
      for (auto& v : phi) v = 0.02 + 0.1 * uniform01(rng);
      const auto f = textbook_dft(n);
      Eigen::VectorXd d(n);
      const auto par = wm.phi_par_ordinates();
      for (std::size_t r = 0; r < n; ++r) {
        const auto j = ordinate_of_row(r, n);
        d(r) = std::sqrt(par[j] / phi[j]);
      }
      const Eigen::MatrixXd c = f.transpose() * d.asDiagonal() * f;
      const Eigen::MatrixXd gp = dense_toeplitz(wm.gamma_par(), n);
      const Eigen::MatrixXd gn = dense_toeplitz(g, n);
      const double ref = (c * gp.llt().solve(c * gn)).trace();
      CHECK(correction_trace(phi, wm, g) == doctest::Approx(ref).epsilon(1e-9));
    }
  }

  const auto ma = preset_truth(Preset::cantor_ma1);
  const auto rows = trace_limit_check(ma, ma, WorkingModel::white_noise(1.0, 64), {64, 256});
  CHECK(rows.back().limit == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rows.back().error < 0.05);
}

TEST_CASE("quadratic-form law of large numbers") {
  const auto white_phi = SpectralFn::constant(1.0 / (2.0 * pi));
  const auto wm = WorkingModel::white_noise(1.0, 64);
  const auto unit_acf = [](std::size_t n) {
    std::vector<double> g(n, 0.0);
    g[0] = 1.0;
    return g;
  };
  const SeriesGenerator zeros = [](std::size_t n, std::uint64_t) { return TimeSeries(std::vector<double>(n, 0.0)); };
  for (const auto& r : quadratic_form_lln_check(zeros, unit_acf, white_phi, wm, {32, 64}, 3, 1)) {
    CHECK(r.mean_deviation == doctest::Approx(-r.expected).epsilon(1e-12));
    CHECK(r.expected == doctest::Approx(1.0).epsilon(1e-12));
  }

  const SeriesGenerator gauss = [](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = standard_normal(rng);
    return TimeSeries(x);
  };
  const auto rows = quadratic_form_lln_check(gauss, unit_acf, white_phi, wm, {64, 256}, 1000, 2);
  for (const auto& r : rows) {
    const double sd = std::sqrt(2.0 / static_cast<double>(r.n));
    CHECK(r.sd_deviation == doctest::Approx(sd).epsilon(0.1));
    CHECK(std::abs(r.mean_deviation) < 4.0 * sd / std::sqrt(1000.0));
  }
  CHECK(rows[1].iqr_deviation < rows[0].iqr_deviation);
}

TEST_CASE("Bernstein property sweep") {
  const auto r = bernstein_property_sweep(300, 54);
  CHECK(r.cases >= 300);
  CHECK(r.passed());
  CHECK(r.partition_max_error < 1e-9);
}

TEST_CASE("small contraction run is reproducible") {
  const auto truth = preset_truth(Preset::cantor_ma1);
  const SeriesGenerator gen = [](std::size_t n, std::uint64_t s) {
    return simulate_preset(Preset::cantor_ma1, n, s);
  };
  FitSettings settings;
  settings.mcmc.n_iter = 700;
  settings.mcmc.burn_in = 200;
  settings.mcmc.thin = 2;
  const double huge = 10.0 * truth.grid_max(4097);
  const auto a = contraction_experiment(truth, gen, {64}, 2, settings, huge, 5);
  const auto b = contraction_experiment(truth, gen, {64}, 2, settings, huge, 5);
  REQUIRE(a.cells.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.cells[i].ok);
    CHECK(a.cells[i].outside_mass == 0.0);
    CHECK(a.cells[i].iae == b.cells[i].iae);
    CHECK(a.cells[i].iae > 0.0);
  }
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].fitted == 2);
}
