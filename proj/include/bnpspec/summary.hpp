#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bnpspec/sampler.hpp"
#include "bnpspec/types.hpp"

namespace bnpspec {

struct Band {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct SummaryMetrics {
  double sup_error = 0.0;             // sup |median - truth| on the grid
  double integrated_abs_error = 0.0;  // int_0^1 |median - truth|
  double pointwise_coverage = 0.0;    // fraction of grid points inside the pointwise band
  double uniform_coverage = 0.0;
  bool pointwise_covers = false;      // truth inside the band at every grid point
  bool uniform_covers = false;
};

struct PosteriorSummary {
  std::vector<double> grid;
  std::vector<double> median;
  std::vector<double> mean;
  std::vector<double> mad;
  double level = 0.9;
  Band pointwise;
  Band uniform;
  double uniform_multiplier = 0.0;  // C*
  std::size_t draws = 0;
  std::optional<std::vector<double>> truth;
  std::optional<SummaryMetrics> metrics;
};

/// Minimum number of retained draws summarize_posterior accepts.
inline constexpr std::size_t kMinSummaryDraws = 100;

/// Draws are rows of values on `draw_grid` (increasing); they are linearly
/// interpolated to `grid`.
///
/// Pointwise band: empirical (1-level)/2 and (1+level)/2 quantiles.
/// Uniform band: median +- C* mad, C* the level-quantile over draws of
/// sup |draw - median| / mad, widened where needed so it contains the
/// pointwise band.
///
/// Throws InsufficientSampleError below kMinSummaryDraws draws and
/// InvalidInput unless 0.5 < level < 1.
PosteriorSummary summarize_posterior(const std::vector<std::vector<double>>& draws,
                                     std::span<const double> draw_grid, std::span<const double> grid,
                                     double level, const std::optional<SpectralFn>& truth = std::nullopt);

/// Pooled phi draws of the traces on the Fourier grid of their n.
PosteriorSummary summarize_posterior(const std::vector<McmcTrace>& traces, std::span<const double> grid,
                                     double level, const std::optional<SpectralFn>& truth = std::nullopt);

/// Linear interpolation of (xs, ys) at x (clamped to the end points).
double interpolate(std::span<const double> xs, std::span<const double> ys, double x);

/// Fraction of draws with sup_j |draw_j - truth(grid_j)| >= r.
double outside_mass(const std::vector<std::vector<double>>& draws, std::span<const double> grid,
                    const SpectralFn& truth, double r);

/// sup and integrated absolute error of a curve given on `grid` against the
/// truth, both on a 1025-point Simpson grid after linear interpolation.
std::pair<double, double> curve_errors(std::span<const double> grid, std::span<const double> curve,
                                       const SpectralFn& truth);

/// grid,median,mean,pw_lower,pw_upper,unif_lower,unif_upper[,periodogram,log_periodogram][,truth]
void write_summary_csv(std::ostream& out, const PosteriorSummary& s,
                       const std::optional<std::vector<double>>& periodogram = std::nullopt);

}  // namespace bnpspec
