#include "bnpspec/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bnpspec/dft.hpp"
#include "bnpspec/errors.hpp"

namespace bnpspec {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

bool below_floor(std::span<const double> phi, double floor, std::size_t* where) {
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (!(phi[j] > 0.0) || phi[j] < floor || !std::isfinite(phi[j])) {
      *where = j;
      return true;
    }
  }
  return false;
}
}  // namespace

CorrectedWhittle::CorrectedWhittle(const TimeSeries& x, WorkingModel wm)
    : n_(x.size()), wm_(std::move(wm)) {
  if (wm_.n() != n_) wm_ = wm_.at(n_);
  fx_ = real_dft_apply(x.values(), DftDirection::forward);
  mult_ = ordinate_multiplicity(n_);
  ordinate_power_.assign(ordinate_count(n_), 0.0);
  for (std::size_t row = 0; row < n_; ++row) {
    ordinate_power_[ordinate_of_row(row, n_)] += fx_[row] * fx_[row];
  }
}

CorrectedWhittle::Parts CorrectedWhittle::evaluate(std::span<const double> phi) const {
  const auto par = wm_.phi_par_ordinates();
  const auto& toep = wm_.toeplitz();
  Parts out;
  double sum_log_ratio = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) sum_log_ratio += mult_[j] * std::log(phi[j] / par[j]);
  out.half_log_det = 0.5 * (-toep.log_det() - sum_log_ratio);

  if (wm_.is_white()) {
    // Gamma_par = s2 I and F_n is orthogonal, so the inverse transform drops out.
    const double s2 = wm_.gamma_par()[0];
    double q = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) q += ordinate_power_[j] * par[j] / phi[j];
    out.quadratic_form = q / s2;
  } else {
    std::vector<double> scaled(n_);
    for (std::size_t row = 0; row < n_; ++row) {
      const std::size_t j = ordinate_of_row(row, n_);
      scaled[row] = fx_[row] * std::sqrt(par[j] / phi[j]);
    }
    std::vector<double> z(n_);
    real_dft_apply(scaled, z, DftDirection::inverse);
    out.quadratic_form = toep.inverse_quadratic_form(z);
  }
  out.value = -static_cast<double>(n_) * kHalfLog2Pi + out.half_log_det - 0.5 * out.quadratic_form;
  return out;
}

CorrectedWhittle::Parts CorrectedWhittle::parts(std::span<const double> phi, double floor) const {
  if (phi.size() != ordinate_count(n_)) {
    throw InvalidInput("expected " + std::to_string(ordinate_count(n_)) +
                       " Fourier ordinates, got " + std::to_string(phi.size()));
  }
  std::size_t where = 0;
  if (below_floor(phi, floor, &where)) {
    std::ostringstream msg;
    msg << "spectral density " << phi[where] << " at ordinate " << where << " (y="
        << 2.0 * static_cast<double>(where) / static_cast<double>(n_) << ") is below the floor "
        << floor;
    throw ParameterSpaceError(msg.str());
  }
  return evaluate(phi);
}

double CorrectedWhittle::operator()(std::span<const double> phi, double floor) const {
  return parts(phi, floor).value;
}

std::optional<double> CorrectedWhittle::try_evaluate(std::span<const double> phi,
                                                     double floor) const noexcept {
  std::size_t where = 0;
  if (phi.size() != ordinate_count(n_) || below_floor(phi, floor, &where)) return std::nullopt;
  try {
    const double v = evaluate(phi).value;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

std::vector<double> CorrectedWhittle::apply_correction(std::span<const double> phi) const {
  const auto par = wm_.phi_par_ordinates();
  std::vector<double> scaled(n_);
  for (std::size_t row = 0; row < n_; ++row) {
    const std::size_t j = ordinate_of_row(row, n_);
    scaled[row] = fx_[row] * std::sqrt(par[j] / phi[j]);
  }
  return real_dft_apply(scaled, DftDirection::inverse);
}

double corrected_log_likelihood(const TimeSeries& x, const SpectralFn& phi, const WorkingModel& wm,
                                double floor) {
  const CorrectedWhittle lik(x, wm);
  const auto values = phi.fourier_values(x.size());
  return lik(values, floor);
}

double whittle_log_likelihood(const TimeSeries& x, const SpectralFn& phi, double floor) {
  const double var = x.variance();
  const auto wm = WorkingModel::white_noise(var > 0.0 ? var : 1.0, x.size());
  return corrected_log_likelihood(x, phi, wm, floor);
}

}  // namespace bnpspec
