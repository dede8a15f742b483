#include "bnpspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bnpspec/errors.hpp"

namespace bnpspec {

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    (i % 2 == 1 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double simpson_samples(const std::vector<double>& s) {
  if (s.size() < 3 || s.size() % 2 == 0) {
    throw InvalidInput("simpson_samples needs an odd number (>= 3) of samples");
  }
  const std::size_t intervals = s.size() - 1;
  const double h = 1.0 / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) (i % 2 == 1 ? odd : even) += s[i];
  return h / 3.0 * (s.front() + s.back() + 4.0 * odd + 2.0 * even);
}

std::vector<double> acf_from_spectral(const SpectralFn& phi, std::size_t max_lag) {
  std::size_t intervals = std::max<std::size_t>(kSimpsonPoints, 32 * max_lag);
  if (intervals % 2 != 0) ++intervals;
  const double h = 1.0 / static_cast<double>(intervals);

  std::vector<double> fx(intervals + 1);
  std::vector<double> weight(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double x = h * static_cast<double>(i);
    const double v = phi(x);
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError("acf_from_spectral: spectral density not positive at x=" +
                        std::to_string(x));
    }
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    weight[i] = w * h / 3.0;
    fx[i] = v;
  }

  std::vector<double> gamma(max_lag + 1, 0.0);
#pragma omp parallel for schedule(static) if (max_lag > 64)
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const double freq = std::numbers::pi * static_cast<double>(k);
    double s = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
      s += weight[i] * fx[i] * std::cos(freq * h * static_cast<double>(i));
    }
    gamma[k] = 2.0 * std::numbers::pi * s;
  }
  return gamma;
}

}  // namespace bnpspec
