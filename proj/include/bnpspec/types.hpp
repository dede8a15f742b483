#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bnpspec {

/// Observed real-valued series X_1..X_n with generator metadata.
class TimeSeries {
 public:
  TimeSeries() = default;
  /// Throws InvalidInput when n < 8 or a value is not finite.
  explicit TimeSeries(std::vector<double> values, bool mean_centered = false,
                      std::uint64_t seed = 0, std::string generator = "external");

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool mean_centered() const noexcept { return mean_centered_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& generator() const noexcept { return generator_; }

  double mean() const;
  /// Population (divide-by-n) variance.
  double variance() const;
  /// Copy with the sample mean removed.
  TimeSeries centered() const;

 private:
  std::vector<double> values_;
  bool mean_centered_ = false;
  std::uint64_t seed_ = 0;
  std::string generator_;
};

/// Spectral density rescaled to [0,1]:
///   phi(x) = (1/2pi) * sum_k gamma(k) cos(k pi x).
///
/// Value type. Closed-form densities may carry their exact autocovariance so
/// callers can skip quadrature when it is known analytically.
class SpectralFn {
 public:
  enum class Kind { closed_form, grid, bernstein };
  using Eval = std::function<double(double)>;
  using ExactAcf = std::function<double(std::size_t)>;

  SpectralFn(Kind kind, Eval eval, std::string label = {}, ExactAcf exact_acf = {});

  double operator()(double x) const { return eval_(x); }
  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  bool has_exact_acf() const noexcept { return static_cast<bool>(exact_acf_); }
  double exact_acf(std::size_t lag) const { return exact_acf_(lag); }

  /// Values at the scaled Fourier frequencies y_j = 2j/n, j = 0..floor(n/2).
  std::vector<double> fourier_values(std::size_t n) const;

  /// Copy with the Fourier-frequency cache populated for `n`.
  SpectralFn with_fourier_cache(std::size_t n) const;
  /// Cached values if populated for exactly `n`.
  std::optional<std::span<const double>> fourier_cache(std::size_t n) const;

  /// Minimum over `points` equally spaced points including both endpoints.
  double grid_min(std::size_t points = 1024) const;
  double grid_max(std::size_t points = 1024) const;
  /// Throws DomainError unless the function is positive and finite on the
  /// 1024-point check grid.
  void require_positive() const;

  // Factories ------------------------------------------------------------

  static SpectralFn constant(double value);
  /// ARMA(p,q) density sigma2/(2pi) |theta(e^{-i pi x})|^2 / |a(e^{-i pi x})|^2
  /// with X_t = sum a_i X_{t-i} + e_t + sum theta_j e_{t-j}.
  static SpectralFn arma(std::vector<double> ar, std::vector<double> ma, double sigma2);
  /// pi*x + pi/2 on [0,1], the Lipschitz-but-not-C1 example, with exact ACF.
  static SpectralFn lipschitz_example();
  /// Piecewise-linear interpolation of values on a uniform grid over [0,1].
  static SpectralFn from_grid(std::vector<double> values, std::string label = "grid");
  /// Cosine series (1/2pi)(gamma(0) + 2 sum_{k>=1} gamma(k) cos(k pi x)).
  static SpectralFn from_acf(std::vector<double> gamma, std::string label = "acf");

 private:
  Kind kind_;
  Eval eval_;
  std::string label_;
  ExactAcf exact_acf_;
  std::size_t cache_n_ = 0;
  std::shared_ptr<const std::vector<double>> cache_;
};

/// Number of distinct Fourier ordinates j = 0..floor(n/2).
inline std::size_t ordinate_count(std::size_t n) { return n / 2 + 1; }

/// Scaled Fourier frequencies y_j = 2j/n, j = 0..floor(n/2).
std::vector<double> fourier_ordinates(std::size_t n);

/// How often ordinate j appears on the diagonal of D_n: 1 for j = 0 and for
/// j = n/2 (n even), 2 otherwise.
std::vector<int> ordinate_multiplicity(std::size_t n);

/// D_n(xi) in the layout (xi(0), xi(y1), xi(y1), ..., xi(yN), xi(yN)[, xi(1)]).
struct FreqDiagonal {
  std::size_t n = 0;
  std::vector<double> entries;
};

/// Throws DomainError when xi is not strictly positive at a required frequency.
FreqDiagonal freq_diagonal(const SpectralFn& xi, std::size_t n);
/// Same layout from ordinate values (length floor(n/2)+1).
FreqDiagonal freq_diagonal_from_ordinates(std::span<const double> ordinate_values, std::size_t n);

/// Row of F_n that carries ordinate j: row 0 -> j=0, rows 2j-1,2j -> j,
/// row n-1 -> n/2 for even n.
std::size_t ordinate_of_row(std::size_t row, std::size_t n);

}  // namespace bnpspec
