#include "bnpspec/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bnpspec/errors.hpp"
#include "bnpspec/kernels.hpp"

namespace bnpspec {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCachedOrders = 64;
}  // namespace

void ThetaBounds::validate() const {
  if (!(m > 0.0 && m < M_bound && std::isfinite(M_bound))) {
    std::ostringstream msg;
    msg << "Theta bounds need 0 < m < M_bound < inf (got m=" << m << ", M_bound=" << M_bound << ")";
    throw InvalidInput(msg.str());
  }
}

std::string Membership::describe() const {
  std::ostringstream s;
  switch (reason) {
    case Reason::none: s << "inside"; break;
    case Reason::lower_bound: s << "outside(lower-bound): grid min " << grid_min; break;
    case Reason::lipschitz: s << "outside(lipschitz): bound " << lipschitz_bound; break;
  }
  return s.str();
}

double log_rho(std::size_t k, const PriorHyper& hyper) {
  if (k < 1 || k > hyper.k_max) return kNegInf;
  const double r = hyper.k_ratio;
  const double kmax = static_cast<double>(hyper.k_max);
  if (r == 1.0) return -std::log(kmax);
  // (1-r) r^{k-1} / (1 - r^{kmax})
  return std::log1p(-r) + static_cast<double>(k - 1) * std::log(r) -
         std::log1p(-std::pow(r, kmax));
}

double log_tau_prior(double tau, const PriorHyper& hyper) {
  if (!(tau > 0.0) || !std::isfinite(tau)) return kNegInf;
  if (hyper.tau_family == PriorHyper::TauFamily::log_uniform) {
    if (tau < hyper.tau_lo || tau > hyper.tau_hi) return kNegInf;
    return -std::log(tau) - std::log(std::log(hyper.tau_hi) - std::log(hyper.tau_lo));
  }
  const double a = hyper.tau_shape;
  const double b = hyper.tau_rate;
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(tau) - b / tau;
}

double prior_log_density(const BdpState& state, const PriorHyper& hyper) {
  double lp = log_rho(state.k, hyper);
  if (lp == kNegInf) return lp;
  lp += log_tau_prior(state.tau, hyper);
  if (lp == kNegInf) return lp;
  const double m = state.sticks.concentration;
  const double log_m = std::log(m);
  for (std::size_t l = 0; l < state.sticks.truncation(); ++l) {
    const double v = state.sticks.v[l];
    const double z = state.sticks.z[l];
    if (!(v > 0.0 && v < 1.0) || !(z >= 0.0 && z <= 1.0)) return kNegInf;
    lp += log_m + (m - 1.0) * std::log1p(-v);
  }
  return lp;
}

namespace {

std::size_t sample_k(Rng& rng, const PriorHyper& hyper) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  for (std::size_t k = 1; k <= hyper.k_max; ++k) {
    cdf += std::exp(log_rho(k, hyper));
    if (u <= cdf) return k;
  }
  return hyper.k_max;
}

double sample_tau(Rng& rng, const PriorHyper& hyper) {
  if (hyper.tau_family == PriorHyper::TauFamily::log_uniform) {
    const double a = std::log(hyper.tau_lo);
    const double b = std::log(hyper.tau_hi);
    return std::exp(a + (b - a) * uniform01(rng));
  }
  double g = std::gamma_distribution<double>(hyper.tau_shape, 1.0 / hyper.tau_rate)(rng);
  g = std::max(g, std::numeric_limits<double>::min());
  return std::min(1.0 / g, std::numeric_limits<double>::max());
}

}  // namespace

BdpState sample_prior_state(Rng& rng, const PriorHyper& hyper, double delta,
                            std::optional<std::size_t> k) {
  BdpState s;
  s.k = k ? *k : sample_k(rng, hyper);
  s.tau = sample_tau(rng, hyper);
  s.sticks = stick_breaking_sample(rng, hyper.truncation, hyper.concentration);
  s.delta = delta;
  return s;
}

SpectralFn state_to_spectral(const BdpState& state, const WorkingModel& wm) {
  if (!(state.tau > 0.0)) throw InvalidInput("tau must be positive");
  auto w = state.weights();
  const double tau = state.tau;
  const double delta = state.delta;
  SpectralFn par = wm.phi_par();
  auto eval = [w = std::move(w), tau, delta, par](double x) {
    const double base = tau * bernstein_eval(x, w);
    return delta == 0.0 ? base : base * std::pow(par(x), delta);
  };
  SpectralFn phi(SpectralFn::Kind::bernstein, std::move(eval), "bdp");
  return phi.with_fourier_cache(wm.n());
}

double state_lipschitz_bound(const BernsteinWeights& w, double tau, double par_power_lip) {
  return tau * (bernstein_sup_bound(w) + bernstein_lipschitz_analytic(w)) * par_power_lip;
}

Membership theta_membership(double grid_min, double lipschitz_bound, const ThetaBounds& bounds) {
  Membership r;
  r.grid_min = grid_min;
  r.lipschitz_bound = lipschitz_bound;
  if (!(grid_min >= bounds.m) || !(grid_min > 0.0)) {
    r.inside = false;
    r.reason = Membership::Reason::lower_bound;
  } else if (!(lipschitz_bound <= bounds.M_bound)) {
    r.inside = false;
    r.reason = Membership::Reason::lipschitz;
  }
  return r;
}

Membership theta_membership(const BdpState& state, const WorkingModel& wm,
                            const ThetaBounds& bounds) {
  BdpEvaluator ev(wm, state.delta);
  BdpEvaluator::Result res;
  ev.evaluate(state.weights(), state.tau, res);
  return theta_membership(res.check_min, res.lipschitz_bound, bounds);
}

double grid_lipschitz_norm(const SpectralFn& f, std::size_t points) {
  const auto grid = unit_grid(points);
  const double h = grid[1] - grid[0];
  double prev = f(grid[0]);
  double sup = std::abs(prev);
  double lip = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    sup = std::max(sup, std::abs(v));
    lip = std::max(lip, std::abs(v - prev) / h);
    prev = v;
  }
  return sup + lip;
}

Membership theta_membership_grid(const SpectralFn& phi, const ThetaBounds& bounds,
                                 std::size_t points) {
  return theta_membership(phi.grid_min(points), grid_lipschitz_norm(phi, points), bounds);
}

BdpEvaluator::BdpEvaluator(const WorkingModel& wm, double delta)
    : ord_grid_(fourier_ordinates(wm.n())), check_grid_(unit_grid(kCheckGridPoints)) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in [0,1]");
  par_pow_ord_.assign(ord_grid_.size(), 1.0);
  par_pow_check_.assign(check_grid_.size(), 1.0);
  if (delta != 0.0) {
    const auto& par = wm.phi_par();
    for (std::size_t j = 0; j < ord_grid_.size(); ++j)
      par_pow_ord_[j] = std::pow(par(ord_grid_[j]), delta);
    for (std::size_t j = 0; j < check_grid_.size(); ++j)
      par_pow_check_[j] = std::pow(par(check_grid_[j]), delta);
  }
  par_power_lip_ = wm.power_lipschitz_norm(delta);
}

const std::vector<double>& BdpEvaluator::basis(std::map<std::size_t, std::vector<double>>& cache,
                                               const std::vector<double>& grid, std::size_t k) {
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  if (cache.size() >= kMaxCachedOrders) cache.clear();
  return cache.emplace(k, kernels::bernstein_basis(grid, k)).first->second;
}

void BdpEvaluator::evaluate(const BernsteinWeights& w, double tau, Result& out) {
  const std::size_t k = w.k();
  const auto& bo = basis(ord_basis_, ord_grid_, k);
  out.ordinates.resize(ord_grid_.size());
  kernels::matvec({bo, ord_grid_.size(), k}, w.w, out.ordinates);
  for (std::size_t j = 0; j < out.ordinates.size(); ++j) out.ordinates[j] *= tau * par_pow_ord_[j];

  const auto& bc = basis(check_basis_, check_grid_, k);
  scratch_.resize(check_grid_.size());
  kernels::matvec({bc, check_grid_.size(), k}, w.w, scratch_);
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < scratch_.size(); ++j) mn = std::min(mn, tau * scratch_[j] * par_pow_check_[j]);
  for (double v : out.ordinates) mn = std::min(mn, v);
  out.check_min = mn;
  out.lipschitz_bound = state_lipschitz_bound(w, tau, par_power_lip_);
}

ThetaBounds auto_theta_bounds(std::span<const double> periodogram,
                              const std::optional<SpectralFn>& truth) {
  if (periodogram.size() < 3) throw InvalidInput("periodogram too short for automatic bounds");
  const double scale =
      std::accumulate(periodogram.begin(), periodogram.end(), 0.0) / static_cast<double>(periodogram.size());
  double floor_value = 0.0;
  if (truth) {
    floor_value = truth->grid_min(kCheckGridPoints);
  } else {
    // Daniell smoother; the raw periodogram has exponential-type ordinates
    // with minimum near zero, so it cannot serve as a floor directly.
    const std::size_t len = periodogram.size();
    const std::size_t half = std::max<std::size_t>(2, len / 16);
    floor_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t lo = j >= half ? j - half : 0;
      const std::size_t hi = std::min(len - 1, j + half);
      double s = 0.0;
      for (std::size_t i = lo; i <= hi; ++i) s += periodogram[i];
      floor_value = std::min(floor_value, s / static_cast<double>(hi - lo + 1));
    }
  }
  if (!(scale > 0.0) || !(floor_value > 0.0)) {
    throw InvalidInput("automatic Theta bounds need a positive periodogram; set bounds explicitly");
  }
  ThetaBounds b{0.25 * floor_value, 20.0 * scale};
  if (!(b.m < b.M_bound)) b.M_bound = 20.0 * std::max(scale, floor_value);
  return b;
}

}  // namespace bnpspec
