#include "bnpspec/stick_breaking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bnpspec/errors.hpp"

namespace bnpspec {

std::vector<double> stick_masses(std::span<const double> v) {
  std::vector<double> p(v.size());
  double left = 1.0;
  for (std::size_t l = 0; l < v.size(); ++l) {
    p[l] = v[l] * left;
    left *= (1.0 - v[l]);
  }
  return p;
}

std::vector<double> StickBreaking::weights() const {
  auto p = stick_masses(v);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total > 0.0) {
    for (double& x : p) x /= total;
  }
  return p;
}

double StickBreaking::remainder() const {
  double left = 1.0;
  for (double x : v) left *= (1.0 - x);
  return left;
}

StickBreaking stick_breaking_sample(Rng& rng, std::size_t truncation, double concentration,
                                    const std::function<double(Rng&)>& base) {
  if (truncation < 1) throw InvalidInput("stick-breaking truncation must be >= 1");
  if (!(concentration > 0.0)) throw InvalidInput("DP concentration must be positive");
  StickBreaking s;
  s.concentration = concentration;
  s.v.resize(truncation);
  s.z.resize(truncation);
  for (std::size_t l = 0; l < truncation; ++l) {
    // Beta(1, M) by inversion: 1 - U^{1/M}; keep strictly inside (0,1).
    double u = uniform01(rng);
    double v = -std::expm1(std::log1p(-u) / concentration);
    s.v[l] = std::clamp(v, 1e-300, 1.0 - 1e-16);
    s.z[l] = base ? base(rng) : uniform01(rng);
  }
  return s;
}

std::size_t bernstein_bin(double z, std::size_t k) {
  const double scaled = std::ceil(z * static_cast<double>(k));
  if (!(scaled >= 1.0)) return 1;
  return std::min(static_cast<std::size_t>(scaled), k);
}

BernsteinWeights dp_to_bernstein_weights(std::span<const double> p, std::span<const double> z,
                                         std::size_t k) {
  if (k < 1) throw InvalidInput("Bernstein order must be >= 1");
  if (p.size() != z.size()) throw InvalidInput("stick masses and locations differ in length");
  BernsteinWeights bw{std::vector<double>(k, 0.0)};
  for (std::size_t l = 0; l < p.size(); ++l) bw.w[bernstein_bin(z[l], k) - 1] += p[l];
  return bw;
}

BernsteinWeights dp_to_bernstein_weights(const StickBreaking& sticks, std::size_t k) {
  const auto p = sticks.weights();
  return dp_to_bernstein_weights(p, sticks.z, k);
}

}  // namespace bnpspec
