#pragma once

#include <vector>

#include "bnpspec/types.hpp"

namespace bnpspec {

/// I(y_j) = |sum_t x_t e^{-i t pi y_j}|^2 / (2 pi n) at y_j = 2j/n,
/// j = 0..floor(n/2). White noise with variance s2 has E I = s2/(2pi).
/// The series is used as given; centre it first.
std::vector<double> periodogram(const TimeSeries& x);

/// Parseval: (2pi/n) sum_j mult_j I(y_j) = (1/n) sum_t x_t^2.
double periodogram_power(const std::vector<double>& pgram, std::size_t n);

}  // namespace bnpspec
