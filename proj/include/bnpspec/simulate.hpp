#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnpspec/rng.hpp"
#include "bnpspec/types.hpp"

namespace bnpspec {

/// Innovation law. `scale` is the standard deviation (gaussian) or the
/// half-width (uniform); student_t is standardized to variance df/(df-2).
struct InnovationSpec {
  enum class Family { gaussian, cantor, uniform, student_t };
  Family family = Family::gaussian;
  double scale = 1.0;
  double df = 5.0;
  int depth = 40;

  static InnovationSpec gaussian(double sd = 1.0) { return {Family::gaussian, sd, 5.0, 40}; }
  static InnovationSpec cantor(int depth = 40) { return {Family::cantor, 1.0, 5.0, depth}; }
  static InnovationSpec uniform(double half_width) { return {Family::uniform, half_width, 5.0, 40}; }
  static InnovationSpec student_t(double df) { return {Family::student_t, 1.0, df, 40}; }

  /// Analytic variance; throws InvalidInput when infinite (student_t with df <= 2).
  double variance() const;
  double draw(Rng& rng) const;
  std::string name() const;
};

/// X_t = sum a_i X_{t-i} + e_t + sum theta_j e_{t-j}.
struct ArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  InnovationSpec innovations;

  /// Throws SpecError when an AR or MA root has modulus <= 1 + 1e-8.
  void validate() const;
  /// Spectral density on [0,1] implied by the innovation variance.
  SpectralFn spectral_density() const;
};

/// sum_{n=1}^{depth} 2 B_n / 3^n - 1/2 with fair coin flips B_n.
double cantor_draw(Rng& rng, int depth = 40);
/// Same series from given digits (test hook).
double cantor_from_bits(std::span<const int> bits);

/// Recursion with `burn` discarded samples (default 1000 + 10(p+q)), mean-centred.
TimeSeries arma_simulate(const ArmaSpec& spec, std::size_t n, Rng& rng,
                         std::optional<std::size_t> burn = std::nullopt, std::uint64_t seed = 0);

/// Zero-mean Gaussian series with autocovariances acf_from_spectral(phi).
/// Circulant embedding when the embedding is nonnegative definite; otherwise
/// sequential generation from the Durbin innovations. n <= 8192.
TimeSeries gaussian_from_spectral(const SpectralFn& phi, std::size_t n, Rng& rng,
                                  std::uint64_t seed = 0);

/// Which path gaussian_from_spectral takes for (gamma, n): true when the
/// circulant embedding of size 2(n-1) is nonnegative definite.
bool circulant_embedding_ok(std::span<const double> gamma);

/// The two worked examples.
enum class Preset { cantor_ma1, lipschitz_gauss };

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);
/// True spectral density of a preset.
SpectralFn preset_truth(Preset p);
/// Exact autocovariances gamma(0..max_lag).
std::vector<double> preset_acf(Preset p, std::size_t max_lag);
TimeSeries simulate_preset(Preset p, std::size_t n, std::uint64_t seed);

}  // namespace bnpspec
