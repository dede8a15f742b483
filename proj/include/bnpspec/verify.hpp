#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnpspec/fit.hpp"
#include "bnpspec/prior.hpp"
#include "bnpspec/rng.hpp"
#include "bnpspec/types.hpp"
#include "bnpspec/working_model.hpp"

namespace bnpspec {

// h functional ---------------------------------------------------------------

/// h(phi) = ln(2pi) + 1/2 int ln phi0 + 1/2 int (phi0/phi - ln(phi0/phi)).
struct HEvaluation {
  double value = 0.0;
  double log_two_pi = 0.0;      // ln(2pi)
  double half_log_phi0 = 0.0;   // 1/2 int ln phi0
  double half_divergence = 0.0; // 1/2 int (y - ln y), y = phi0/phi; >= 1/2
};

/// Simpson quadrature on 4096 intervals. Throws DomainError when either
/// function is not positive at a quadrature node.
HEvaluation h_functional(const SpectralFn& phi, const SpectralFn& phi0);

/// (M/m + 1) M / ((m/M) m^2), the Lipschitz constant of h on Theta.
double h_lipschitz_constant(const ThetaBounds& bounds);
/// ln(2pi) + 1/2 |int ln phi0| + 1/2 (M/m + ln(M/m)).
double h_sup_bound(const SpectralFn& phi0, const ThetaBounds& bounds);

struct HMinimizerReport {
  double h0 = 0.0;
  std::vector<double> gaps;  // h(phi_i) - h(phi0)
  std::size_t lipschitz_pairs = 0;
  std::size_t lipschitz_violations = 0;
  double max_lipschitz_ratio = 0.0;  // max |dh| / (L ||dphi||_inf)
  std::size_t sup_bound_violations = 0;
  bool unique_minimum = true;
  bool passed() const noexcept {
    return unique_minimum && lipschitz_violations == 0 && sup_bound_violations == 0;
  }
};

/// Gaps h(phi_i) - h(phi0) must all be positive; the Lipschitz inequality is
/// checked on (phi0, phi_i) and on consecutive (phi_i, phi_{i+1}). Sup norms on
/// 4097 points. Throws InvalidInput for a perturbation within 1e-3 of phi0.
HMinimizerReport h_minimizer_check(const SpectralFn& phi0, const std::vector<SpectralFn>& perturbations,
                                   const ThetaBounds& bounds);

/// Theta bounds derived from a known truth: m = 0.25 min phi0 (257-point grid),
/// M_bound = 20 int phi0.
ThetaBounds truth_theta_bounds(const SpectralFn& phi0);

/// phi0 * (1 + a (b(.;k,w) - 1)) with Dirichlet weights, k in 2..10, a in
/// [0.05, 0.5], redrawn until inside Theta (grid test) and at least 1e-3 away
/// from phi0 in sup norm.
std::vector<SpectralFn> bernstein_perturbations(const SpectralFn& phi0, const ThetaBounds& bounds,
                                                std::size_t count, Rng& rng);

// Szego and trace limits ------------------------------------------------------

enum class SzegoFunction { log, identity };

struct ConvergenceRow {
  std::size_t n = 0;
  double value = 0.0;
  double limit = 0.0;
  double error = 0.0;  // |value - limit|
};

/// (1/n) sum F(eig T_n(2 pi phi)) against int F(2 pi phi). The log case uses
/// the log-determinant, the identity case the trace. Autocovariances come from
/// the exact ACF when phi carries one, otherwise from quadrature.
std::vector<ConvergenceRow> szego_verify(const SpectralFn& phi, SzegoFunction f,
                                         const std::vector<std::size_t>& n_list);

/// Errors end below `tol` and never grow by more than `slack` between adjacent n.
bool convergence_ok(const std::vector<ConvergenceRow>& rows, double tol, double slack = 0.10);

/// tr(C_n(phi) Gamma_par^{-1} C_n(phi) Gamma_n) with Gamma_n = T_n(gamma0).
double correction_trace(std::span<const double> phi_ordinates, const WorkingModel& wm,
                        std::span<const double> gamma0);

/// (1/n) tr(C_n Gamma_par^{-1} C_n Gamma_n) against int phi0/phi.
std::vector<ConvergenceRow> trace_limit_check(const SpectralFn& phi0, const SpectralFn& phi,
                                              const WorkingModel& wm,
                                              const std::vector<std::size_t>& n_list);

// Quadratic-form LLN ---------------------------------------------------------

using SeriesGenerator = std::function<TimeSeries(std::size_t n, std::uint64_t seed)>;

struct LlnRow {
  std::size_t n = 0;
  double expected = 0.0;  // tr(...)/n
  double mean_deviation = 0.0;
  double sd_deviation = 0.0;
  double iqr_deviation = 0.0;
  std::vector<double> deviations;
};

/// Deviations (1/n)[x' C Gamma_par^{-1} C x - tr(C Gamma_par^{-1} C Gamma_n)]
/// over replicates; `true_acf(n)` gives gamma0(0..n-1).
std::vector<LlnRow> quadratic_form_lln_check(const SeriesGenerator& generator,
                                             const std::function<std::vector<double>(std::size_t)>& true_acf,
                                             const SpectralFn& phi, const WorkingModel& wm,
                                             const std::vector<std::size_t>& n_list, std::size_t replicates,
                                             std::uint64_t seed);

// Contraction experiment -----------------------------------------------------

struct ContractionCell {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double iae = 0.0;
  double sup_error = 0.0;
  double outside_mass = 0.0;
  bool uniform_covers = false;
  double seconds = 0.0;
};

struct ContractionRow {
  std::size_t n = 0;
  std::size_t fitted = 0;
  double median_iae = 0.0;
  double median_sup_error = 0.0;
  double median_outside_mass = 0.0;
};

struct ContractionResult {
  std::vector<ContractionCell> cells;
  std::vector<ContractionRow> rows;
  double radius = 0.0;
};

/// For every (n, replicate): simulate with seed sub_seed(seed, cell), fit with
/// the truth-based bounds, record errors of the posterior median and the mass
/// of draws at sup-distance >= r on the Fourier grid. Cells run in parallel;
/// failures are recorded per cell.
ContractionResult contraction_experiment(const SpectralFn& truth, const SeriesGenerator& generator,
                                         const std::vector<std::size_t>& n_list, std::size_t replicates,
                                         const FitSettings& settings, double radius, std::uint64_t seed);

// Bernstein property sweep ----------------------------------------------------

struct PropertyReport {
  std::size_t cases = 0;
  std::size_t sup_violations = 0;        // sup|b| > k max|w|
  std::size_t lipschitz_violations = 0;  // sup|b'| > 2 k^2 max|w|
  std::size_t kantorovich_violations = 0;
  double partition_max_error = 0.0;      // max |sum_j beta(x;j,k-j+1) - k|
  bool passed() const noexcept {
    return sup_violations == 0 && lipschitz_violations == 0 && kantorovich_violations == 0 &&
           partition_max_error < 1e-9;
  }
};

/// Random signed weight vectors with k uniform on 4..256, plus Kantorovich
/// approximations of random Lipschitz densities, whose Bernstein polynomial
/// must satisfy sup|b| <= sup f and L(b) <= L(f).
PropertyReport bernstein_property_sweep(std::size_t cases, std::uint64_t seed);

}  // namespace bnpspec
