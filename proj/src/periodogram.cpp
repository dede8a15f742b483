#include "bnpspec/periodogram.hpp"

#include <numbers>

#include "bnpspec/dft.hpp"

namespace bnpspec {

std::vector<double> periodogram(const TimeSeries& x) {
  const std::size_t n = x.size();
  const auto fx = real_dft_apply(x.values(), DftDirection::forward);
  const auto mult = ordinate_multiplicity(n);
  // Rows of F_n x carry sqrt(2/n)(Re, Im) of the DFT for paired ordinates and
  // x-sum / sqrt(n) for the singletons, so summing squares over the rows of
  // ordinate j gives mult_j |X_j|^2 / n.
  std::vector<double> out(ordinate_count(n), 0.0);
  for (std::size_t row = 0; row < n; ++row) out[ordinate_of_row(row, n)] += fx[row] * fx[row];
  for (std::size_t j = 0; j < out.size(); ++j) out[j] /= 2.0 * std::numbers::pi * mult[j];
  return out;
}

double periodogram_power(const std::vector<double>& pgram, std::size_t n) {
  const auto mult = ordinate_multiplicity(n);
  double s = 0.0;
  for (std::size_t j = 0; j < pgram.size(); ++j) s += mult[j] * pgram[j];
  return 2.0 * std::numbers::pi * s / static_cast<double>(n);
}

}  // namespace bnpspec
