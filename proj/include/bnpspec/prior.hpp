#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnpspec/bernstein.hpp"
#include "bnpspec/stick_breaking.hpp"
#include "bnpspec/types.hpp"
#include "bnpspec/working_model.hpp"

namespace bnpspec {

/// Hyperparameters of the Bernstein-Dirichlet prior on the correction
/// c(x) = tau * b(x; K, w_K(G)).
struct PriorHyper {
  // rho(k) proportional to ratio^{k-1} on {1..k_max}
  std::size_t k_max = 200;
  double k_ratio = 0.9;

  enum class TauFamily { inverse_gamma, log_uniform };
  TauFamily tau_family = TauFamily::inverse_gamma;
  double tau_shape = 0.001;
  double tau_rate = 0.001;
  // log-uniform support [tau_lo, tau_hi] when tau_family == log_uniform
  double tau_lo = 1e-3;
  double tau_hi = 1e3;

  double concentration = 1.0;  // DP mass M
  std::size_t truncation = 50;  // L
};

/// Markov chain state. phi(x) = tau * b(x; K, w_K(G)) * phi_par(x)^delta.
struct BdpState {
  std::size_t k = 1;
  double tau = 1.0;
  StickBreaking sticks;
  double delta = 0.0;

  BernsteinWeights weights() const { return dp_to_bernstein_weights(sticks, k); }
};

/// Parameter space Theta = { ||phi||_Lip <= M_bound, inf phi >= m }.
struct ThetaBounds {
  double m = 0.0;
  double M_bound = std::numeric_limits<double>::infinity();

  /// Throws InvalidInput unless 0 < m < M_bound < inf.
  void validate() const;
  /// No restriction (prior-only runs and tests).
  static ThetaBounds unrestricted() { return {}; }
  bool restricted() const noexcept {
    return m > 0.0 || M_bound < std::numeric_limits<double>::infinity();
  }
};

struct Membership {
  enum class Reason { none, lower_bound, lipschitz };
  bool inside = true;
  Reason reason = Reason::none;
  double grid_min = 0.0;
  double lipschitz_bound = 0.0;
  std::string describe() const;
};

double log_rho(std::size_t k, const PriorHyper& hyper);
double log_tau_prior(double tau, const PriorHyper& hyper);

/// ln rho(K) + ln p(tau) + sum_l [ln Beta(V_l; 1, M) + ln g0(Z_l)], uniform g0.
/// -inf for tau <= 0 or K outside {1..k_max}.
double prior_log_density(const BdpState& state, const PriorHyper& hyper);

/// Draw a state from the (unrestricted) prior with K fixed when `k` is given.
BdpState sample_prior_state(Rng& rng, const PriorHyper& hyper, double delta,
                            std::optional<std::size_t> k = std::nullopt);

/// x -> tau * b(x; K, w) * phi_par(x)^delta with the Fourier cache filled for wm.n().
SpectralFn state_to_spectral(const BdpState& state, const WorkingModel& wm);

/// Analytic upper bound on ||phi||_Lip for a state:
///   tau * (k max w + k (k-1) max|w_{j+1} - w_j|) * ||phi_par^delta||_Lip.
double state_lipschitz_bound(const BernsteinWeights& w, double tau, double par_power_lip);

/// Membership from a grid minimum and a Lipschitz-norm upper bound.
Membership theta_membership(double grid_min, double lipschitz_bound, const ThetaBounds& bounds);
/// Membership of a BDP state: minimum over a 257-point grid and the analytic bound.
Membership theta_membership(const BdpState& state, const WorkingModel& wm, const ThetaBounds& bounds);
/// Membership of an arbitrary function: grid minimum and a finite-difference
/// Lipschitz norm on `points` points.
Membership theta_membership_grid(const SpectralFn& phi, const ThetaBounds& bounds,
                                 std::size_t points = 4097);

/// Lipschitz norm sup|f| + L(f) estimated by finite differences.
double grid_lipschitz_norm(const SpectralFn& f, std::size_t points = 4097);

/// Number of points of the membership check grid.
inline constexpr std::size_t kCheckGridPoints = 257;

/// Evaluates states on the Fourier ordinates of one n and on the check grid.
/// Holds per-order basis caches; one instance per chain (not shared).
class BdpEvaluator {
 public:
  BdpEvaluator(const WorkingModel& wm, double delta);

  struct Result {
    std::vector<double> ordinates;  // phi at y_j
    double check_min = 0.0;
    double lipschitz_bound = 0.0;
  };

  /// phi at the ordinates, the check-grid minimum and the Lipschitz bound.
  void evaluate(const BernsteinWeights& w, double tau, Result& out);
  double par_power_lipschitz() const noexcept { return par_power_lip_; }
  std::size_t ordinate_count() const noexcept { return ord_grid_.size(); }

 private:
  const std::vector<double>& basis(std::map<std::size_t, std::vector<double>>& cache,
                                   const std::vector<double>& grid, std::size_t k);

  std::vector<double> ord_grid_;
  std::vector<double> check_grid_;
  std::vector<double> par_pow_ord_;
  std::vector<double> par_pow_check_;
  double par_power_lip_ = 1.0;
  std::map<std::size_t, std::vector<double>> ord_basis_;
  std::map<std::size_t, std::vector<double>> check_basis_;
  std::vector<double> scratch_;
};

/// Default Theta bounds: m = 0.25 * floor, M_bound = 20 * scale, where floor is
/// the truth's grid minimum when known, otherwise the minimum of a smoothed
/// periodogram, and scale is the mean periodogram level.
ThetaBounds auto_theta_bounds(std::span<const double> periodogram,
                              const std::optional<SpectralFn>& truth = std::nullopt);

}  // namespace bnpspec
