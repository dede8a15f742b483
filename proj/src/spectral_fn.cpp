#include "bnpspec/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bnpspec/errors.hpp"

namespace bnpspec {

using std::numbers::pi;

TimeSeries::TimeSeries(std::vector<double> values, bool mean_centered, std::uint64_t seed,
                       std::string generator)
    : values_(std::move(values)), mean_centered_(mean_centered), seed_(seed),
      generator_(std::move(generator)) {
  if (values_.size() < 8) {
    throw InvalidInput("time series needs at least 8 observations, got " +
                       std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("non-finite observation at index " + std::to_string(i));
    }
  }
}

double TimeSeries::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double TimeSeries::variance() const {
  const double mu = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(size());
}

TimeSeries TimeSeries::centered() const {
  const double mu = mean();
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [mu](double v) { return v - mu; });
  return TimeSeries(std::move(out), true, seed_, generator_);
}

SpectralFn::SpectralFn(Kind kind, Eval eval, std::string label, ExactAcf exact_acf)
    : kind_(kind), eval_(std::move(eval)), label_(std::move(label)),
      exact_acf_(std::move(exact_acf)) {
  if (!eval_) throw InvalidInput("SpectralFn requires an evaluator");
}

std::vector<double> SpectralFn::fourier_values(std::size_t n) const {
  if (cache_ && cache_n_ == n) return *cache_;
  const auto y = fourier_ordinates(n);
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = eval_(y[j]);
  return out;
}

SpectralFn SpectralFn::with_fourier_cache(std::size_t n) const {
  SpectralFn copy = *this;
  copy.cache_.reset();
  copy.cache_ = std::make_shared<const std::vector<double>>(copy.fourier_values(n));
  copy.cache_n_ = n;
  return copy;
}

std::optional<std::span<const double>> SpectralFn::fourier_cache(std::size_t n) const {
  if (cache_ && cache_n_ == n) return std::span<const double>(*cache_);
  return std::nullopt;
}

double SpectralFn::grid_min(std::size_t points) const {
  double lo = eval_(0.0);
  for (std::size_t i = 1; i < points; ++i) {
    lo = std::min(lo, eval_(static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  return lo;
}

double SpectralFn::grid_max(std::size_t points) const {
  double hi = eval_(0.0);
  for (std::size_t i = 1; i < points; ++i) {
    hi = std::max(hi, eval_(static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  return hi;
}

void SpectralFn::require_positive() const {
  constexpr std::size_t kPoints = 1024;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(kPoints - 1);
    const double v = eval_(x);
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "spectral density '" << label_ << "' is not positive at x=" << x << " (value " << v
          << ")";
      throw DomainError(msg.str());
    }
  }
}

SpectralFn SpectralFn::constant(double value) {
  if (!(value > 0.0)) throw DomainError("constant spectral density must be positive");
  return SpectralFn(
      Kind::closed_form, [value](double) { return value; }, "constant",
      [value](std::size_t lag) { return lag == 0 ? 2.0 * pi * value : 0.0; });
}

namespace {

// |1 - sum a_k z^k|^2 style polynomial magnitude at z = e^{-i pi x}.
double poly_abs2(const std::vector<double>& coeffs, double sign, double x) {
  std::complex<double> acc(1.0, 0.0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double w = pi * x * static_cast<double>(k + 1);
    acc += sign * coeffs[k] * std::complex<double>(std::cos(w), -std::sin(w));
  }
  return std::norm(acc);
}

// ACF of a pure MA(q) process: sigma2 * sum_j theta_j theta_{j+h}, theta_0 = 1.
double ma_acf(const std::vector<double>& ma, double sigma2, std::size_t lag) {
  std::vector<double> th(ma.size() + 1);
  th[0] = 1.0;
  std::copy(ma.begin(), ma.end(), th.begin() + 1);
  if (lag >= th.size()) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j + lag < th.size(); ++j) s += th[j] * th[j + lag];
  return sigma2 * s;
}

}  // namespace

SpectralFn SpectralFn::arma(std::vector<double> ar, std::vector<double> ma, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidInput("innovation variance must be positive");
  std::ostringstream label;
  label << "arma(" << ar.size() << "," << ma.size() << ")";
  ExactAcf acf;
  if (ar.empty()) {
    acf = [ma, sigma2](std::size_t lag) { return ma_acf(ma, sigma2, lag); };
  }
  return SpectralFn(
      Kind::closed_form,
      [ar = std::move(ar), ma = std::move(ma), sigma2](double x) {
        return sigma2 / (2.0 * pi) * poly_abs2(ma, 1.0, x) / poly_abs2(ar, -1.0, x);
      },
      label.str(), std::move(acf));
}

SpectralFn SpectralFn::lipschitz_example() {
  return SpectralFn(
      Kind::closed_form, [](double x) { return pi * std::abs(x) + pi / 2.0; }, "lipschitz-gauss",
      [](std::size_t lag) {
        if (lag == 0) return 2.0 * pi * pi;
        if (lag % 2 == 0) return 0.0;
        const double h = static_cast<double>(lag);
        return -4.0 / (h * h);
      });
}

SpectralFn SpectralFn::from_grid(std::vector<double> values, std::string label) {
  if (values.size() < 2) throw InvalidInput("grid spectral density needs at least 2 points");
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return SpectralFn(
      Kind::grid,
      [shared](double x) {
        const auto& v = *shared;
        const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(v.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(pos), v.size() - 2);
        const double t = pos - static_cast<double>(i);
        return (1.0 - t) * v[i] + t * v[i + 1];
      },
      std::move(label));
}

SpectralFn SpectralFn::from_acf(std::vector<double> gamma, std::string label) {
  if (gamma.empty()) throw InvalidInput("autocovariance sequence is empty");
  auto shared = std::make_shared<const std::vector<double>>(std::move(gamma));
  return SpectralFn(
      Kind::closed_form,
      [shared](double x) {
        const auto& g = *shared;
        double s = g[0];
        for (std::size_t k = 1; k < g.size(); ++k) {
          s += 2.0 * g[k] * std::cos(static_cast<double>(k) * pi * x);
        }
        return s / (2.0 * pi);
      },
      std::move(label), [shared](std::size_t lag) { return lag < shared->size() ? (*shared)[lag] : 0.0; });
}

std::vector<double> fourier_ordinates(std::size_t n) {
  std::vector<double> y(ordinate_count(n));
  for (std::size_t j = 0; j < y.size(); ++j) {
    y[j] = 2.0 * static_cast<double>(j) / static_cast<double>(n);
  }
  return y;
}

std::vector<int> ordinate_multiplicity(std::size_t n) {
  std::vector<int> m(ordinate_count(n), 2);
  m[0] = 1;
  if (n % 2 == 0) m.back() = 1;
  return m;
}

std::size_t ordinate_of_row(std::size_t row, std::size_t n) {
  if (row == 0) return 0;
  if (n % 2 == 0 && row == n - 1) return n / 2;
  return (row + 1) / 2;
}

FreqDiagonal freq_diagonal_from_ordinates(std::span<const double> ordinate_values, std::size_t n) {
  if (ordinate_values.size() != ordinate_count(n)) {
    throw InvalidInput("ordinate vector has wrong length for n=" + std::to_string(n));
  }
  FreqDiagonal d{n, std::vector<double>(n)};
  for (std::size_t row = 0; row < n; ++row) {
    const double v = ordinate_values[ordinate_of_row(row, n)];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("frequency diagonal requires positive values; ordinate " +
                        std::to_string(ordinate_of_row(row, n)) + " is " + std::to_string(v));
    }
    d.entries[row] = v;
  }
  return d;
}

FreqDiagonal freq_diagonal(const SpectralFn& xi, std::size_t n) {
  if (n < 2) throw InvalidInput("freq_diagonal needs n >= 2");
  const auto values = xi.fourier_values(n);
  return freq_diagonal_from_ordinates(values, n);
}

}  // namespace bnpspec
