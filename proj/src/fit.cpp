#include "bnpspec/fit.hpp"

#include <chrono>
#include <sstream>

#include "bnpspec/errors.hpp"
#include "bnpspec/periodogram.hpp"

namespace bnpspec {

WorkingModel WorkingModelSpec::build(const TimeSeries& x) const {
  const std::size_t n = x.size();
  switch (kind) {
    case Kind::white_noise: {
      const double var = x.variance();
      if (!(var > 0.0)) throw InvalidInput("series has zero variance; the white-noise working model is undefined");
      return WorkingModel::white_noise(var, n);
    }
    case Kind::ar: return WorkingModel::autoregressive(ar, sigma2, n);
    case Kind::acf: return WorkingModel::from_acf(acf, n);
  }
  throw InvalidInput("unknown working model");
}

std::string WorkingModelSpec::describe() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::white_noise: s << "white_noise"; break;
    case Kind::ar:
      s << "ar(" << ar.size() << ")";
      break;
    case Kind::acf: s << "acf(" << acf.size() << " lags)"; break;
  }
  return s.str();
}

FitResult fit_series(const TimeSeries& x, const FitSettings& settings,
                     const std::optional<SpectralFn>& truth) {
  if (x.size() < 32) throw InvalidInput("fit needs n >= 32, got " + std::to_string(x.size()));
  const auto t0 = std::chrono::steady_clock::now();
  FitResult r;
  r.series = x.centered();
  r.wm = settings.working_model.build(r.series);
  r.periodogram = periodogram(r.series);
  if (settings.bounds) {
    settings.bounds->validate();
    r.bounds = *settings.bounds;
  } else {
    // Ordinate 0 of a centred series is exactly zero; leave it out of the floor.
    std::vector<double> interior(r.periodogram.begin() + 1, r.periodogram.end());
    r.bounds = auto_theta_bounds(interior, truth);
  }
  const PosteriorProblem problem(r.series, r.wm, settings.hyper, r.bounds, settings.delta);
  r.traces = run_chains(problem, settings.mcmc);
  const auto y = fourier_ordinates(x.size());
  r.summary = summarize_posterior(r.traces, y, settings.level, truth);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace bnpspec
