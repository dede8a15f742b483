#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bnpspec {

enum class DftDirection { forward, inverse };

/// Orthogonal real DFT F_n (Brockwell & Davis 4.5.4) with rows
///   e_0 = n^{-1/2}(1,...,1),
///   c_j = (2/n)^{1/2} cos(w_j t), s_j = (2/n)^{1/2} sin(w_j t), j = 1..floor((n-1)/2),
///   e_{n/2} = n^{-1/2}((-1)^t) for even n,
/// with t = 1..n and w_j = 2 pi j / n. Row order is e_0, c_1, s_1, ..., c_N, s_N[, e_{n/2}],
/// which lines up with the D_n diagonal layout.
///
/// forward returns F_n x, inverse returns F_n' x. Backed by an FFT; safe to call
/// concurrently.
std::vector<double> real_dft_apply(std::span<const double> x, DftDirection direction);

/// In-place variant writing into `out` (same length as x).
void real_dft_apply(std::span<const double> x, std::span<double> out, DftDirection direction);

/// Dense F_n, row-major. Reference path, n <= 512.
std::vector<double> real_dft_matrix(std::size_t n);

/// Dense-matrix application of F_n or F_n'. Reference path, n <= 512.
std::vector<double> real_dft_apply_dense(std::span<const double> x, DftDirection direction);

inline constexpr std::size_t kDenseCap = 512;

/// Unnormalized forward DFT sum_t x_t e^{-2 pi i j t / m}, j = 0..m/2, of a real
/// vector of length m >= 2. Shares the plan cache above.
std::vector<std::complex<double>> fft_real(std::span<const double> x);

}  // namespace bnpspec
