#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bnpspec/toeplitz.hpp"
#include "bnpspec/types.hpp"

namespace bnpspec {

/// Parametric Gaussian working model at a fixed sample size n: phi_par, its
/// autocovariance gamma_par(0..n-1), the lower bound beta_par and the
/// factorized Gamma_par. Cheap to copy; the factorization is shared and
/// immutable.
class WorkingModel {
 public:
  /// phi_par = variance / (2 pi); Gamma_par = variance * I.
  static WorkingModel white_noise(double variance, std::size_t n);
  /// Causal AR(p): X_t = sum a_i X_{t-i} + e_t, Var(e) = sigma2.
  static WorkingModel autoregressive(std::vector<double> coeffs, double sigma2, std::size_t n);
  /// Autocovariances given directly (at least n lags); phi_par is their cosine series.
  static WorkingModel from_acf(std::vector<double> gamma, std::size_t n);
  /// gamma_par by quadrature of a positive spectral density.
  static WorkingModel from_spectral(const SpectralFn& phi, std::size_t n);

  /// Same model re-factorized at another sample size.
  WorkingModel at(std::size_t n) const;

  std::size_t n() const noexcept { return impl_->n; }
  const SpectralFn& phi_par() const noexcept { return impl_->phi; }
  std::span<const double> gamma_par() const noexcept { return impl_->gamma; }
  double beta_par() const noexcept { return impl_->beta; }
  const ToeplitzMatrix& toeplitz() const noexcept { return *impl_->toeplitz; }
  /// phi_par at the Fourier ordinates of n.
  std::span<const double> phi_par_ordinates() const noexcept { return impl_->phi_ordinates; }
  bool is_white() const noexcept { return impl_->white; }
  const std::string& description() const noexcept { return impl_->description; }

  /// Lipschitz norm sup|f| + L(f) of f = phi_par^delta, estimated on a 4097-point grid.
  double power_lipschitz_norm(double delta) const;

 private:
  struct Impl {
    std::size_t n = 0;
    SpectralFn phi = SpectralFn::constant(1.0);
    std::vector<double> gamma;
    double beta = 0.0;
    std::shared_ptr<const ToeplitzMatrix> toeplitz;
    std::vector<double> phi_ordinates;
    bool white = false;
    std::string description;
    // Parameters to rebuild at another n.
    std::vector<double> ar;
    double sigma2 = 0.0;
    std::vector<double> source_acf;
    int source = 0;  // 0 white, 1 ar, 2 acf, 3 spectral
  };
  explicit WorkingModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static WorkingModel finish(Impl impl);

  std::shared_ptr<const Impl> impl_;
};

/// Autocovariances gamma(0..max_lag) of a causal AR(p) process.
std::vector<double> ar_autocovariance(const std::vector<double>& coeffs, double sigma2,
                                      std::size_t max_lag);

}  // namespace bnpspec
