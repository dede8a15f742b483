#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bnpspec {

/// Weights of b(x; k, w) = sum_{j=1}^k w_j beta(x; j, k-j+1).
struct BernsteinWeights {
  std::vector<double> w;
  std::size_t k() const noexcept { return w.size(); }
};

/// beta(x; j, k-j+1) for 1 <= j <= k, evaluated in log space.
/// Throws DomainError for x outside [0,1] and InvalidInput for a bad index.
double beta_density(double x, std::size_t j, std::size_t k);

double bernstein_eval(double x, const BernsteinWeights& bw);

/// b'(x) = k sum_{i=1}^{k-1} (w_{i+1} - w_i) beta(x; i, k-i).
double bernstein_derivative(double x, const BernsteinWeights& bw);

/// Grid supremum of |b'| over 2048 points. Asserts the result does not exceed
/// 2 k^2 max|w_j|.
double bernstein_lipschitz_bound(const BernsteinWeights& bw);

/// k * max|w_j|, an upper bound on sup|b|.
double bernstein_sup_bound(const BernsteinWeights& bw);
/// k (k-1) max|w_{j+1} - w_j|, an upper bound on the Lipschitz constant of b.
double bernstein_lipschitz_analytic(const BernsteinWeights& bw);

/// Kantorovich weights w_j = F(j/k) - F((j-1)/k) of a distribution function on [0,1].
BernsteinWeights kantorovich_weights(const std::function<double(double)>& cdf, std::size_t k);

/// Equally spaced grid of `points` values on [0,1], endpoints included.
std::vector<double> unit_grid(std::size_t points);

}  // namespace bnpspec
