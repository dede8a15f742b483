#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bnpspec/bernstein.hpp"
#include "bnpspec/rng.hpp"

namespace bnpspec {

/// Truncated stick-breaking representation of G ~ DP(M G_0):
///   p_l = V_l prod_{s<l} (1 - V_s),  atoms at Z_l,  l = 1..L.
/// The leftover mass prod (1 - V_l) is folded back by renormalizing p.
struct StickBreaking {
  std::vector<double> v;
  std::vector<double> z;
  double concentration = 1.0;

  std::size_t truncation() const noexcept { return v.size(); }
  /// Renormalized atom weights (sum exactly 1 up to rounding).
  std::vector<double> weights() const;
  /// Unrenormalized leftover prod_l (1 - V_l).
  double remainder() const;
};

/// Unrenormalized p_l from stick fractions.
std::vector<double> stick_masses(std::span<const double> v);

/// V_l ~ Beta(1, M), Z_l ~ base (uniform by default).
StickBreaking stick_breaking_sample(Rng& rng, std::size_t truncation, double concentration,
                                    const std::function<double(Rng&)>& base = {});

/// w_j = sum { p_l : Z_l in ((j-1)/k, j/k] }, with Z_l = 0 assigned to bin 1.
BernsteinWeights dp_to_bernstein_weights(std::span<const double> p, std::span<const double> z,
                                         std::size_t k);
BernsteinWeights dp_to_bernstein_weights(const StickBreaking& sticks, std::size_t k);

/// Bin (1-based) that location z falls into at order k.
std::size_t bernstein_bin(double z, std::size_t k);

}  // namespace bnpspec
