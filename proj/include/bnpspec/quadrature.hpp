#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bnpspec/types.hpp"

namespace bnpspec {

/// Default number of Simpson sub-intervals on [0,1].
inline constexpr std::size_t kSimpsonPoints = 4096;

/// Composite Simpson rule on [a,b]; `intervals` is rounded up to even.
double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t intervals = kSimpsonPoints);

/// Composite Simpson on [0,1] from equally spaced samples (odd count >= 3).
double simpson_samples(const std::vector<double>& samples);

/// gamma(k) = 2pi * int_0^1 phi(x) cos(k pi x) dx for k = 0..max_lag.
///
/// The grid has at least 4096 sub-intervals and at least 32 per lag so that
/// the highest harmonic stays resolved.
std::vector<double> acf_from_spectral(const SpectralFn& phi, std::size_t max_lag);

}  // namespace bnpspec
