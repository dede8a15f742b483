#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bnpspec/types.hpp"
#include "bnpspec/working_model.hpp"

namespace bnpspec {

/// Corrected Whittle log-likelihood for one fixed series and working model:
///
///   ln f_phi(x) = -(n/2) ln(2pi) + 1/2 ln det(Gamma_par^{-1} C_n^2(phi))
///                 - 1/2 x' C_n(phi) Gamma_par^{-1} C_n(phi) x,
///   C_n(phi) = F_n' D_n^{-1/2}(phi/phi_par) F_n.
///
/// F_n x is computed once at construction; each evaluation takes phi at the
/// Fourier ordinates y_j = 2j/n, j = 0..floor(n/2). Evaluation is const and
/// thread-safe.
class CorrectedWhittle {
 public:
  CorrectedWhittle(const TimeSeries& x, WorkingModel wm);

  struct Parts {
    double half_log_det = 0.0;    // 1/2 ln det(Gamma_par^{-1} C_n^2)
    double quadratic_form = 0.0;  // x' C Gamma_par^{-1} C x
    double value = 0.0;           // full log-likelihood
  };

  /// Throws ParameterSpaceError when any ordinate value is below `floor` or not
  /// strictly positive.
  double operator()(std::span<const double> phi_ordinates, double floor = 0.0) const;
  /// nullopt instead of ParameterSpaceError.
  std::optional<double> try_evaluate(std::span<const double> phi_ordinates,
                                     double floor = 0.0) const noexcept;
  Parts parts(std::span<const double> phi_ordinates, double floor = 0.0) const;

  /// C_n(phi) x, for diagnostics and the quadratic-form checks.
  std::vector<double> apply_correction(std::span<const double> phi_ordinates) const;

  std::size_t n() const noexcept { return n_; }
  const WorkingModel& working_model() const noexcept { return wm_; }
  std::span<const double> transformed() const noexcept { return fx_; }

 private:
  Parts evaluate(std::span<const double> phi_ordinates) const;

  std::size_t n_;
  WorkingModel wm_;
  std::vector<double> fx_;             // F_n x
  std::vector<double> ordinate_power_; // sum of (F_n x)_k^2 over the rows of ordinate j
  std::vector<int> mult_;
};

/// ln f_phi(x) for a spectral density evaluated at the Fourier ordinates of n.
double corrected_log_likelihood(const TimeSeries& x, const SpectralFn& phi, const WorkingModel& wm,
                                double floor = 0.0);

/// Whittle likelihood: the corrected likelihood under the white-noise working
/// model with variance equal to the sample variance of x.
double whittle_log_likelihood(const TimeSeries& x, const SpectralFn& phi, double floor = 0.0);

}  // namespace bnpspec
