#include "bnpspec/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnpspec/errors.hpp"
#include "bnpspec/kernels.hpp"

namespace bnpspec {

double beta_density(double x, std::size_t j, std::size_t k) {
  if (j < 1 || j > k) {
    throw InvalidInput("beta_density index j=" + std::to_string(j) + " outside 1.." +
                       std::to_string(k));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "beta_density evaluated at x=" << x << " outside [0,1]";
    throw DomainError(msg.str());
  }
  const double a = static_cast<double>(j);
  const double b = static_cast<double>(k - j + 1);
  // Endpoints: 0^0 = 1.
  if (x == 0.0) return j == 1 ? b : 0.0;
  if (x == 1.0) return j == k ? a : 0.0;
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

double bernstein_eval(double x, const BernsteinWeights& bw) {
  double s = 0.0;
  for (std::size_t j = 1; j <= bw.k(); ++j) s += bw.w[j - 1] * beta_density(x, j, bw.k());
  return s;
}

double bernstein_derivative(double x, const BernsteinWeights& bw) {
  const std::size_t k = bw.k();
  if (k < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < k; ++i) s += (bw.w[i] - bw.w[i - 1]) * beta_density(x, i, k - 1);
  return static_cast<double>(k) * s;
}

double bernstein_sup_bound(const BernsteinWeights& bw) {
  double m = 0.0;
  for (double v : bw.w) m = std::max(m, std::abs(v));
  return static_cast<double>(bw.k()) * m;
}

double bernstein_lipschitz_analytic(const BernsteinWeights& bw) {
  const std::size_t k = bw.k();
  double m = 0.0;
  for (std::size_t i = 1; i < k; ++i) m = std::max(m, std::abs(bw.w[i] - bw.w[i - 1]));
  return static_cast<double>(k) * static_cast<double>(k - 1) * m;
}

double bernstein_lipschitz_bound(const BernsteinWeights& bw) {
  const std::size_t k = bw.k();
  if (k < 2) return 0.0;
  const auto grid = unit_grid(2048);
  const auto basis = kernels::bernstein_basis(grid, k - 1);
  std::vector<double> diff(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) diff[i] = bw.w[i + 1] - bw.w[i];
  std::vector<double> deriv(grid.size());
  kernels::matvec({basis, grid.size(), k - 1}, diff, deriv);
  double sup = 0.0;
  for (double d : deriv) sup = std::max(sup, std::abs(d));
  sup *= static_cast<double>(k);
  double wmax = 0.0;
  for (double v : bw.w) wmax = std::max(wmax, std::abs(v));
  if (sup > 2.0 * static_cast<double>(k * k) * wmax * (1.0 + 1e-12)) {
    throw NumericError("Bernstein derivative exceeds 2k^2 max|w|; basis evaluation is broken");
  }
  return sup;
}

BernsteinWeights kantorovich_weights(const std::function<double(double)>& cdf, std::size_t k) {
  if (k < 1) throw InvalidInput("Bernstein order must be >= 1");
  BernsteinWeights bw{std::vector<double>(k)};
  double prev = cdf(0.0);
  for (std::size_t j = 1; j <= k; ++j) {
    const double cur = cdf(static_cast<double>(j) / static_cast<double>(k));
    bw.w[j - 1] = cur - prev;
    prev = cur;
  }
  return bw;
}

std::vector<double> unit_grid(std::size_t points) {
  if (points < 2) throw InvalidInput("grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  }
  g.back() = 1.0;
  return g;
}

}  // namespace bnpspec
