#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnpspec/prior.hpp"
#include "bnpspec/sampler.hpp"
#include "bnpspec/summary.hpp"
#include "bnpspec/types.hpp"
#include "bnpspec/working_model.hpp"

namespace bnpspec {

struct WorkingModelSpec {
  enum class Kind { white_noise, ar, acf };
  Kind kind = Kind::white_noise;
  std::vector<double> ar;   // Kind::ar
  double sigma2 = 1.0;      // Kind::ar innovation variance
  std::vector<double> acf;  // Kind::acf, at least n lags

  /// White noise uses the sample variance of x.
  WorkingModel build(const TimeSeries& x) const;
  std::string describe() const;
};

struct FitSettings {
  WorkingModelSpec working_model;
  double delta = 0.0;
  std::optional<ThetaBounds> bounds;  // automatic when empty
  PriorHyper hyper;
  McmcConfig mcmc;
  double level = 0.9;
};

struct FitResult {
  TimeSeries series;  // mean-centred
  WorkingModel wm = WorkingModel::white_noise(1.0, 8);
  ThetaBounds bounds;
  std::vector<double> periodogram;
  std::vector<McmcTrace> traces;
  PosteriorSummary summary;  // on the Fourier grid
  double seconds = 0.0;
};

/// Centre, build the working model and bounds, run the chains and summarize on
/// the Fourier grid. `truth` feeds the automatic bounds and the metrics.
/// Throws InvalidInput for n < 32.
FitResult fit_series(const TimeSeries& x, const FitSettings& settings,
                     const std::optional<SpectralFn>& truth = std::nullopt);

}  // namespace bnpspec
