#include "bnpspec/working_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bnpspec/errors.hpp"
#include "bnpspec/quadrature.hpp"
#include "poly_roots.hpp"

namespace bnpspec {

std::vector<double> ar_autocovariance(const std::vector<double>& a, double sigma2,
                                      std::size_t max_lag) {
  const std::size_t p = a.size();
  if (detail::min_root_modulus(a, -1.0) <= 1.0 + 1e-8) {
    throw SpecError("AR polynomial is not causal");
  }
  std::vector<double> gamma(std::max(max_lag, p) + 1, 0.0);
  if (p == 0) {
    gamma[0] = sigma2;
  } else {
    // gamma(k) - sum_i a_i gamma(|k-i|) = sigma2 [k == 0], k = 0..p
    const auto dim = static_cast<Eigen::Index>(p + 1);
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    rhs(0) = sigma2;
    for (std::size_t k = 0; k <= p; ++k) {
      sys(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += 1.0;
      for (std::size_t i = 1; i <= p; ++i) {
        const std::size_t lag = k > i ? k - i : i - k;
        sys(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lag)) -= a[i - 1];
      }
    }
    Eigen::VectorXd g = sys.fullPivLu().solve(rhs);
    for (std::size_t k = 0; k <= p; ++k) gamma[k] = g(static_cast<Eigen::Index>(k));
    for (std::size_t k = p + 1; k < gamma.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 1; i <= p; ++i) s += a[i - 1] * gamma[k - i];
      gamma[k] = s;
    }
  }
  gamma.resize(max_lag + 1);
  return gamma;
}

WorkingModel WorkingModel::finish(Impl impl) {
  if (impl.n < 2) throw InvalidInput("working model needs n >= 2");
  if (impl.gamma.size() < impl.n) throw InvalidInput("working model needs n autocovariances");
  impl.gamma.resize(impl.n);
  impl.phi_ordinates = impl.phi.fourier_values(impl.n);
  impl.beta = impl.phi.grid_min(1024);
  for (double v : impl.phi_ordinates) impl.beta = std::min(impl.beta, v);
  if (!(impl.beta > 0.0)) {
    throw DomainError("working-model spectral density is not bounded away from zero");
  }
  impl.toeplitz = std::make_shared<const ToeplitzMatrix>(impl.gamma, impl.n);
  return WorkingModel(std::make_shared<const Impl>(std::move(impl)));
}

WorkingModel WorkingModel::white_noise(double variance, std::size_t n) {
  if (!(variance > 0.0)) throw InvalidInput("white-noise working model needs positive variance");
  Impl impl;
  impl.n = n;
  impl.phi = SpectralFn::constant(variance / (2.0 * std::numbers::pi));
  impl.gamma.assign(n, 0.0);
  impl.gamma[0] = variance;
  impl.white = true;
  impl.sigma2 = variance;
  impl.source = 0;
  std::ostringstream d;
  d << "white_noise(variance=" << variance << ")";
  impl.description = d.str();
  return finish(std::move(impl));
}

WorkingModel WorkingModel::autoregressive(std::vector<double> coeffs, double sigma2, std::size_t n) {
  if (!(sigma2 > 0.0)) throw InvalidInput("AR working model needs positive innovation variance");
  if (coeffs.empty()) return white_noise(sigma2, n);
  Impl impl;
  impl.n = n;
  impl.gamma = ar_autocovariance(coeffs, sigma2, n);
  impl.phi = SpectralFn::arma(coeffs, {}, sigma2);
  impl.ar = coeffs;
  impl.sigma2 = sigma2;
  impl.source = 1;
  std::ostringstream d;
  d << "ar(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) d << (i ? "," : "") << coeffs[i];
  d << "; sigma2=" << sigma2 << ")";
  impl.description = d.str();
  return finish(std::move(impl));
}

WorkingModel WorkingModel::from_acf(std::vector<double> gamma, std::size_t n) {
  if (gamma.empty()) throw InvalidInput("empty autocovariance for working model");
  Impl impl;
  impl.n = n;
  impl.source_acf = gamma;
  impl.phi = SpectralFn::from_acf(gamma, "acf-working-model");
  impl.phi.require_positive();
  gamma.resize(std::max(gamma.size(), n), 0.0);
  impl.gamma = std::move(gamma);
  impl.source = 2;
  impl.description = "acf(" + std::to_string(impl.source_acf.size()) + " lags)";
  return finish(std::move(impl));
}

WorkingModel WorkingModel::from_spectral(const SpectralFn& phi, std::size_t n) {
  phi.require_positive();
  Impl impl;
  impl.n = n;
  impl.phi = phi;
  if (phi.has_exact_acf()) {
    impl.gamma.resize(n);
    for (std::size_t k = 0; k < n; ++k) impl.gamma[k] = phi.exact_acf(k);
  } else {
    impl.gamma = acf_from_spectral(phi, n - 1);
  }
  impl.source = 3;
  impl.description = "spectral(" + phi.label() + ")";
  return finish(std::move(impl));
}

WorkingModel WorkingModel::at(std::size_t n) const {
  if (n == impl_->n) return *this;
  switch (impl_->source) {
    case 0:
      return white_noise(impl_->sigma2, n);
    case 1:
      return autoregressive(impl_->ar, impl_->sigma2, n);
    case 2:
      return from_acf(impl_->source_acf, n);
    default:
      return from_spectral(impl_->phi, n);
  }
}

double WorkingModel::power_lipschitz_norm(double delta) const {
  if (delta == 0.0) return 1.0;
  constexpr std::size_t kPoints = 4097;
  const double h = 1.0 / static_cast<double>(kPoints - 1);
  double sup = 0.0;
  double lip = 0.0;
  double prev = std::pow(impl_->phi(0.0), delta);
  sup = prev;
  for (std::size_t i = 1; i < kPoints; ++i) {
    const double v = std::pow(impl_->phi(h * static_cast<double>(i)), delta);
    sup = std::max(sup, v);
    lip = std::max(lip, std::abs(v - prev) / h);
    prev = v;
  }
  return sup + lip;
}

}  // namespace bnpspec
