#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "bnpspec/bernstein.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/periodogram.hpp"
#include "bnpspec/sampler.hpp"
#include "bnpspec/summary.hpp"

using namespace bnpspec;

namespace {

TimeSeries white_series(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sd * standard_normal(rng);
  return TimeSeries(x).centered();
}

PriorHyper bounded_tau_hyper() {
  PriorHyper h;
  h.tau_family = PriorHyper::TauFamily::log_uniform;
  return h;
}

}  // namespace

TEST_CASE("Metropolis accept step on a three-state target") {
  const double target[3] = {0.2, 0.3, 0.5};
  Rng rng(31);
  std::size_t state = 0;
  double counts[3] = {0, 0, 0};
  const std::size_t steps = 1000000;
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t prop = (state + 1 + (uniform01(rng) < 0.5 ? 0 : 1)) % 3;
    if (mh_accept(std::log(target[prop]) - std::log(target[state]), rng)) state = prop;
    counts[state] += 1.0;
  }
  double tv = 0.0;
  for (int i = 0; i < 3; ++i) tv += 0.5 * std::abs(counts[i] / steps - target[i]);
  CHECK(tv < 0.02);

  CHECK_FALSE(mh_accept(-std::numeric_limits<double>::infinity(), rng));
  CHECK_FALSE(mh_accept(std::numeric_limits<double>::quiet_NaN(), rng));
  CHECK(mh_accept(0.0, rng));
}

TEST_CASE("tau block acceptance under a flat target") {
  const auto x = white_series(64, 1);
  PriorHyper h = bounded_tau_hyper();
  const PosteriorProblem problem(x, WorkingModel::white_noise(1.0, 64), h, ThetaBounds::unrestricted(), 0.0);
  TargetEvaluator eval(problem, true);
  Rng rng(32);
  ChainState cs;
  cs.state = sample_prior_state(rng, h, 0.0, 3);
  cs.state.tau = 1.0;
  cs.log_prior = prior_log_density(cs.state, h);
  ProposalScales scales;
  scales.v.assign(h.truncation, 1.0);
  scales.z.assign(h.truncation, 0.1);
  scales.log_tau = 2.0;
  std::size_t accepted = 0;
  const std::size_t steps = 1000000;
  for (std::size_t i = 0; i < steps; ++i) accepted += mh_block_update(cs, Block::tau, rng, scales, problem, eval);
  // Gaussian step s on a uniform interval of length L: 1 - s E|Z| / L.
  const double len = std::log(h.tau_hi / h.tau_lo);
  const double expected = 1.0 - scales.log_tau * std::sqrt(2.0 / std::numbers::pi) / len;
  CHECK(std::abs(static_cast<double>(accepted) / steps - expected) < 0.005);
}

TEST_CASE("prior-only chain recovers rho(K)") {
  const auto x = white_series(64, 2);
  PriorHyper h;
  // The K marginal does not depend on the sticks; a short truncation keeps this fast.
  h.truncation = 5;
  const PosteriorProblem problem(x, WorkingModel::white_noise(1.0, 64), h, ThetaBounds::unrestricted(), 0.0);
  McmcConfig cfg;
  cfg.stub_likelihood = true;
  cfg.store_phi = false;
  cfg.k_jump = 10;
  cfg.thin = 20;
  cfg.burn_in = 1000;
  cfg.n_iter = cfg.burn_in + 100000 * cfg.thin;
  cfg.seed = 33;
  const auto tr = run_chain(problem, cfg, cfg.seed);
  REQUIRE(tr.size() == 100000);
  std::vector<double> hist(h.k_max + 1, 0.0);
  for (const auto& s : tr.states) hist[s.k] += 1.0;
  double tv = 0.0;
  for (std::size_t k = 1; k <= h.k_max; ++k)
    tv += 0.5 * std::abs(hist[k] / static_cast<double>(tr.size()) - std::exp(log_rho(k, h)));
  CHECK(tv < 0.02);
}

TEST_CASE("log target") {
  const auto x = white_series(64, 3);
  const PriorHyper h = bounded_tau_hyper();
  const auto wm = WorkingModel::white_noise(1.0, 64);
  BdpState s;
  s.k = 1;
  s.tau = 0.2;
  s.sticks.v = {0.5};
  s.sticks.z = {0.5};

  const PosteriorProblem restricted(x, wm, h, ThetaBounds{0.5, 100.0}, 0.0);
  CHECK(log_target(s, restricted) == -std::numeric_limits<double>::infinity());

  const PosteriorProblem open(x, wm, h, ThetaBounds::unrestricted(), 0.0);
  auto s2 = s;
  s2.tau = 2.0 * s.tau;
  // Constant phi = tau: ln f(2 tau) - ln f(tau) = -(n/2) ln 2 + Q(tau)/4.
  const auto q = open.likelihood.parts(std::vector<double>(ordinate_count(64), s.tau)).quadratic_form;
  const double expected =
      -32.0 * std::log(2.0) + 0.25 * q + log_tau_prior(s2.tau, h) - log_tau_prior(s.tau, h);
  CHECK(log_target(s2, open) - log_target(s, open) == doctest::Approx(expected).epsilon(1e-10));

  // Same grid values and prior terms: same target, whichever atom locations.
  auto moved = s;
  moved.sticks.z = {0.9};
  CHECK(log_target(moved, open) == log_target(s, open));
}

TEST_CASE("initial state") {
  const PriorHyper h;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = white_series(128, 100 + seed, 1.7);
    const auto pg = periodogram(x);
    double level = 0.0;
    for (std::size_t j = 1; j < pg.size(); ++j) level += pg[j];
    level /= static_cast<double>(pg.size() - 1);
    std::vector<double> interior(pg.begin() + 1, pg.end());
    const auto bounds = auto_theta_bounds(interior);
    const PosteriorProblem problem(x, WorkingModel::white_noise(x.variance(), 128), h, bounds, 0.0);
    Rng rng(seed);
    const auto s = initialize_state(problem, rng);
    TargetEvaluator ev(problem, false);
    CHECK(ev.membership(s).inside);
    const auto phi = state_to_spectral(s, problem.wm);
    // b has unit mass, so the grid mean of phi is tau.
    double mean_phi = 0.0;
    const auto grid = unit_grid(257);
    for (double y : grid) mean_phi += phi(y);
    mean_phi /= static_cast<double>(grid.size());
    CHECK(mean_phi < 2.0 * level);
    CHECK(mean_phi > level / 2.0);
  }

  const auto x = white_series(64, 5);
  const PosteriorProblem impossible(x, WorkingModel::white_noise(1.0, 64), h, ThetaBounds{50.0, 60.0}, 0.0);
  Rng rng(1);
  CHECK_THROWS_AS(initialize_state(impossible, rng), InitializationError);
}

TEST_CASE("chains are reproducible and independently seeded") {
  const auto x = white_series(64, 6);
  const auto pg = periodogram(x);
  const PosteriorProblem problem(x, WorkingModel::white_noise(x.variance(), 64), PriorHyper{},
                                 auto_theta_bounds(std::vector<double>(pg.begin() + 1, pg.end())), 0.0);
  McmcConfig cfg;
  cfg.n_iter = 600;
  cfg.burn_in = 200;
  cfg.thin = 2;
  cfg.seed = 77;
  cfg.chains = 2;
  const auto a = run_chains(problem, cfg);
  const auto b = run_chains(problem, cfg);
  REQUIRE(a.size() == 2);
  CHECK(a[0].seed != a[1].seed);
  CHECK(a[0].seed == sub_seed(77, 0));
  CHECK(a[0].log_posterior == b[0].log_posterior);
  CHECK(a[1].phi == b[1].phi);
  CHECK(a[0].log_posterior != a[1].log_posterior);
  CHECK(a[0].size() == 200);
  for (const auto& row : a[0].phi) CHECK(row.size() == ordinate_count(64));
  for (const auto& t : a) {
    CHECK(t.acceptance.v > 0.0);
    CHECK(t.acceptance.tau > 0.0);
  }
  const auto pooled = pooled_phi(a);
  CHECK(pooled.size() == 400);
  const auto y = fourier_ordinates(64);
  const auto s = summarize_posterior(a, y, 0.9);
  CHECK(s.draws == 400);

  McmcConfig bad = cfg;
  bad.burn_in = bad.n_iter;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("restricted chains stay inside Theta") {
  const auto x = white_series(64, 7);
  const ThetaBounds bounds{0.05, 2.0};
  const PosteriorProblem problem(x, WorkingModel::white_noise(x.variance(), 64), PriorHyper{}, bounds, 0.0);
  McmcConfig cfg;
  cfg.n_iter = 400;
  cfg.burn_in = 100;
  cfg.thin = 3;
  const auto tr = run_chain(problem, cfg, 9);
  TargetEvaluator ev(problem, false);
  for (const auto& s : tr.states) CHECK(ev.membership(s).inside);
  for (const auto& row : tr.phi)
    for (double v : row) CHECK(v >= bounds.m);
}
