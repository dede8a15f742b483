#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "bnpspec/bernstein.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/prior.hpp"
#include "bnpspec/quadrature.hpp"
#include "bnpspec/stick_breaking.hpp"
#include "bnpspec/working_model.hpp"

using namespace bnpspec;

namespace {

BdpState single_atom_state(std::size_t k, double tau, double z, double delta = 0.0) {
  BdpState s;
  s.k = k;
  s.tau = tau;
  s.delta = delta;
  s.sticks.v = {0.5};
  s.sticks.z = {z};
  return s;
}

}  // namespace

TEST_CASE("beta densities") {
  for (double x : {0.0, 0.3, 0.77, 1.0}) CHECK(beta_density(x, 1, 1) == doctest::Approx(1.0));
  CHECK(beta_density(0.5, 2, 3) == doctest::Approx(1.5));
  for (std::size_t k : {1u, 7u, 50u, 200u}) {
    for (std::size_t j : {std::size_t{1}, (k + 1) / 2, k}) {
      const double mass = simpson([&](double x) { return beta_density(x, j, k); }, 0.0, 1.0, 20000);
      CHECK(std::abs(mass - 1.0) < 1e-9);
    }
  }
  CHECK_THROWS_AS(beta_density(1.5, 1, 2), DomainError);
  CHECK_THROWS_AS(beta_density(0.5, 0, 2), InvalidInput);
}

TEST_CASE("Bernstein polynomials") {
  for (std::size_t k : {1u, 5u, 64u}) {
    BernsteinWeights u{std::vector<double>(k, 1.0 / static_cast<double>(k))};
    for (double x : unit_grid(33)) CHECK(bernstein_eval(x, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bernstein_lipschitz_bound(u) < 1e-10);
  }
  const BernsteinWeights w{{1.0, 0.0}};
  CHECK(bernstein_eval(0.0, w) == doctest::Approx(2.0));
  CHECK(bernstein_eval(1.0, w) == doctest::Approx(0.0));
  CHECK(bernstein_eval(0.25, w) == doctest::Approx(1.5));
  for (double x : {0.0, 0.4, 1.0}) CHECK(bernstein_derivative(x, w) == doctest::Approx(-2.0));
  CHECK(bernstein_lipschitz_bound(w) == doctest::Approx(2.0));
  CHECK(bernstein_lipschitz_bound(w) <= 2.0 * 4.0 * 1.0);

  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = 2 + rep % 49;
    BernsteinWeights r;
    for (std::size_t j = 0; j < k; ++j) r.w.push_back(2.0 * uniform01(rng) - 1.0);
    double maxw = 0.0;
    for (double v : r.w) maxw = std::max(maxw, std::abs(v));
    double sup = 0.0;
    for (double x : unit_grid(1024)) sup = std::max(sup, std::abs(bernstein_eval(x, r)));
    CHECK(sup <= k * maxw + 1e-12);
    CHECK(bernstein_lipschitz_bound(r) <= 2.0 * k * k * maxw);
    CHECK(bernstein_lipschitz_bound(r) <= bernstein_lipschitz_analytic(r) + 1e-9);
  }
}

TEST_CASE("stick breaking") {
  Rng rng(22);
  const auto sb = stick_breaking_sample(rng, 50, 1.0);
  const auto p = sb.weights();
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  double mean_p1 = 0.0, mean_rem = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto s = stick_breaking_sample(rng, 50, 1.0);
    mean_p1 += s.v[0];
    mean_rem += s.remainder();
  }
  CHECK(std::abs(mean_p1 / draws - 0.5) < 0.01);
  // E prod (1 - V_l) = 2^-50.
  CHECK(mean_rem / draws < 1e-10);

  const std::vector<double> v = {0.5, 0.5, 1.0};
  const auto m = stick_masses(v);
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[1] == doctest::Approx(0.25));
  CHECK(m[2] == doctest::Approx(0.25));
}

TEST_CASE("DP atoms to Bernstein weights") {
  const std::vector<double> one = {1.0};
  CHECK(dp_to_bernstein_weights(one, std::vector<double>{0.7}, 1).w == std::vector<double>{1.0});
  CHECK(dp_to_bernstein_weights(one, std::vector<double>{0.5}, 4).w == std::vector<double>{0.0, 1.0, 0.0, 0.0});
  const std::vector<double> p = {0.3, 0.7}, z = {0.2, 0.9};
  const auto w = dp_to_bernstein_weights(p, z, 2).w;
  CHECK(w[0] == doctest::Approx(0.3));
  CHECK(w[1] == doctest::Approx(0.7));
  CHECK(bernstein_bin(0.0, 5) == 1);
  CHECK(bernstein_bin(0.2, 5) == 1);
  CHECK(bernstein_bin(0.2000001, 5) == 2);
  CHECK(bernstein_bin(1.0, 5) == 5);
}

TEST_CASE("prior state to spectral density") {
  const auto white = WorkingModel::white_noise(2.0, 64);
  const auto c = state_to_spectral(single_atom_state(1, 0.7, 0.4), white);
  for (double x : {0.0, 0.5, 1.0}) CHECK(c(x) == doctest::Approx(0.7));

  const auto ar = WorkingModel::autoregressive({0.5}, 1.0, 64);
  const auto exact = state_to_spectral(single_atom_state(1, 1.0, 0.4, 1.0), ar);
  for (double x : {0.0, 0.3, 1.0}) CHECK(exact(x) == doctest::Approx(ar.phi_par()(x)).epsilon(1e-12));

  const auto lin = state_to_spectral(single_atom_state(2, 0.5, 0.2), white);
  CHECK(lin(0.0) == doctest::Approx(1.0));
  CHECK(lin(0.5) == doctest::Approx(0.5));
  CHECK(lin(1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("membership in the restricted parameter space") {
  const ThetaBounds b{0.1, 10.0};
  CHECK(theta_membership_grid(SpectralFn::constant(5.05), b).inside);
  const auto low = theta_membership_grid(SpectralFn::constant(0.05), b);
  CHECK_FALSE(low.inside);
  CHECK(low.reason == Membership::Reason::lower_bound);

  const auto white = WorkingModel::white_noise(1.0, 64);
  const auto m = theta_membership(single_atom_state(2, 1.0, 0.2), white, b);
  CHECK_FALSE(m.inside);
  CHECK(m.reason == Membership::Reason::lower_bound);

  const auto steep = theta_membership(single_atom_state(2, 5.0, 0.2), white, ThetaBounds{1e-6, 10.0});
  CHECK(steep.reason != Membership::Reason::none);

  CHECK_THROWS_AS((ThetaBounds{0.0, 1.0}).validate(), InvalidInput);
  CHECK_THROWS_AS((ThetaBounds{2.0, 1.0}).validate(), InvalidInput);
  CHECK_FALSE(ThetaBounds::unrestricted().restricted());
}

TEST_CASE("prior log density") {
  PriorHyper h;
  double total = 0.0;
  for (std::size_t k = 1; k <= h.k_max; ++k) total += std::exp(log_rho(k, h));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 1; k < h.k_max; ++k)
    CHECK(log_rho(k + 1, h) - log_rho(k, h) == doctest::Approx(std::log(0.9)).epsilon(1e-12));
  CHECK(log_rho(0, h) == -std::numeric_limits<double>::infinity());
  CHECK(log_rho(h.k_max + 1, h) == -std::numeric_limits<double>::infinity());

  auto a = single_atom_state(3, 0.4, 0.1);
  auto b = a;
  b.tau = 2.5;
  CHECK(prior_log_density(a, h) - prior_log_density(b, h) ==
        doctest::Approx(log_tau_prior(0.4, h) - log_tau_prior(2.5, h)).epsilon(1e-12));
  auto z = a;
  z.sticks.z = {0.93};
  CHECK(prior_log_density(z, h) == doctest::Approx(prior_log_density(a, h)).epsilon(1e-14));
  a.tau = -1.0;
  CHECK(prior_log_density(a, h) == -std::numeric_limits<double>::infinity());

  // Inverse gamma(a, b) density at tau.
  const double tau = 0.8;
  CHECK(log_tau_prior(tau, h) ==
        doctest::Approx(h.tau_shape * std::log(h.tau_rate) - std::lgamma(h.tau_shape) -
                        (h.tau_shape + 1.0) * std::log(tau) - h.tau_rate / tau));
}

TEST_CASE("evaluator agrees with direct evaluation") {
  const auto ar = WorkingModel::autoregressive({0.4}, 1.0, 64);
  BdpEvaluator ev(ar, 0.5);
  Rng rng(23);
  PriorHyper h;
  h.tau_family = PriorHyper::TauFamily::log_uniform;
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = sample_prior_state(rng, h, 0.5, 1 + static_cast<std::size_t>(rep * 7 % 60));
    BdpEvaluator::Result r;
    ev.evaluate(s.weights(), s.tau, r);
    const auto phi = state_to_spectral(s, ar);
    const auto y = fourier_ordinates(64);
    for (std::size_t j = 0; j < y.size(); ++j) CHECK(r.ordinates[j] == doctest::Approx(phi(y[j])).epsilon(1e-10));
    CHECK(r.check_min == doctest::Approx(phi.grid_min(kCheckGridPoints)).epsilon(1e-10));
    CHECK(r.lipschitz_bound ==
          doctest::Approx(state_lipschitz_bound(s.weights(), s.tau, ar.power_lipschitz_norm(0.5))).epsilon(1e-10));
    // The analytic bound dominates a finite-difference estimate.
    CHECK(grid_lipschitz_norm(phi) <= r.lipschitz_bound * (1.0 + 1e-9));
  }
}

TEST_CASE("automatic bounds") {
  std::vector<double> flat(64, 0.2);
  const auto b = auto_theta_bounds(flat);
  CHECK(b.m == doctest::Approx(0.05));
  CHECK(b.M_bound == doctest::Approx(4.0));
  const auto t = auto_theta_bounds(flat, SpectralFn::lipschitz_example());
  CHECK(t.m == doctest::Approx(0.25 * std::numbers::pi / 2));
}
