#include "bnpspec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bnpspec/dft.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/quadrature.hpp"
#include "poly_roots.hpp"

namespace bnpspec {

double InnovationSpec::variance() const {
  switch (family) {
    case Family::gaussian: return scale * scale;
    case Family::cantor: return 0.125;
    case Family::uniform: return scale * scale / 3.0;
    case Family::student_t:
      if (!(df > 2.0)) throw InvalidInput("student_t innovations need df > 2 for a finite variance");
      return df / (df - 2.0);
  }
  return 0.0;
}

double InnovationSpec::draw(Rng& rng) const {
  switch (family) {
    case Family::gaussian: return scale * standard_normal(rng);
    case Family::cantor: return cantor_draw(rng, depth);
    case Family::uniform: return scale * (2.0 * uniform01(rng) - 1.0);
    case Family::student_t: return std::student_t_distribution<double>(df)(rng);
  }
  return 0.0;
}

std::string InnovationSpec::name() const {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::cantor: return "cantor";
    case Family::uniform: return "uniform";
    case Family::student_t: return "student_t";
  }
  return "?";
}

void ArmaSpec::validate() const {
  const double ar_min = detail::min_root_modulus(ar, -1.0);
  if (!(ar_min > 1.0 + 1e-8)) {
    std::ostringstream msg;
    msg << "AR polynomial is not causal: root modulus " << ar_min << " <= 1";
    throw SpecError(msg.str());
  }
  const double ma_min = detail::min_root_modulus(ma, 1.0);
  if (!(ma_min > 1.0 + 1e-8)) {
    std::ostringstream msg;
    msg << "MA polynomial is not invertible: root modulus " << ma_min << " <= 1";
    throw SpecError(msg.str());
  }
  (void)innovations.variance();
}

SpectralFn ArmaSpec::spectral_density() const {
  return SpectralFn::arma(ar, ma, innovations.variance());
}

double cantor_draw(Rng& rng, int depth) {
  if (depth < 1) throw InvalidInput("Cantor depth must be >= 1");
  // 64 coin flips per engine call.
  double s = 0.0;
  double w = 2.0 / 3.0;
  std::uint64_t bits = 0;
  int left = 0;
  for (int i = 0; i < depth; ++i) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    if (bits & 1u) s += w;
    bits >>= 1;
    --left;
    w /= 3.0;
  }
  return s - 0.5;
}

double cantor_from_bits(std::span<const int> bits) {
  double s = 0.0;
  double w = 2.0 / 3.0;
  for (int b : bits) {
    if (b) s += w;
    w /= 3.0;
  }
  return s - 0.5;
}

TimeSeries arma_simulate(const ArmaSpec& spec, std::size_t n, Rng& rng,
                         std::optional<std::size_t> burn, std::uint64_t seed) {
  spec.validate();
  const std::size_t p = spec.ar.size();
  const std::size_t q = spec.ma.size();
  const std::size_t b = burn ? *burn : 1000 + 10 * (p + q);
  const std::size_t total = b + n;
  std::vector<double> e(total);
  for (double& v : e) v = spec.innovations.draw(rng);
  std::vector<double> x(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    double s = e[t];
    for (std::size_t i = 1; i <= p && i <= t; ++i) s += spec.ar[i - 1] * x[t - i];
    for (std::size_t j = 1; j <= q && j <= t; ++j) s += spec.ma[j - 1] * e[t - j];
    x[t] = s;
  }
  std::vector<double> out(x.begin() + static_cast<std::ptrdiff_t>(b), x.end());
  const double mu = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(n);
  for (double& v : out) v -= mu;
  std::ostringstream gen;
  gen << "arma(" << p << "," << q << ")-" << spec.innovations.name();
  return TimeSeries(std::move(out), true, seed, gen.str());
}

namespace {

std::vector<double> embedding_eigenvalues(std::span<const double> gamma) {
  const std::size_t n = gamma.size();
  const std::size_t m = 2 * (n - 1);
  std::vector<double> c(m);
  for (std::size_t k = 0; k < n; ++k) c[k] = gamma[k];
  for (std::size_t k = 1; k + 1 < n; ++k) c[m - k] = gamma[k];
  const auto f = fft_real(c);
  std::vector<double> lam(m);
  for (std::size_t k = 0; k <= m / 2; ++k) lam[k] = f[k].real();
  for (std::size_t k = m / 2 + 1; k < m; ++k) lam[k] = lam[m - k];
  return lam;
}

std::vector<double> circulant_sample(std::span<const double> gamma, const std::vector<double>& lam,
                                     Rng& rng) {
  const std::size_t n = gamma.size();
  const std::size_t m = lam.size();
  std::vector<double> a1(m), a2(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::sqrt(std::max(lam[k], 0.0) / static_cast<double>(m));
    a1[k] = a * standard_normal(rng);
    a2[k] = a * standard_normal(rng);
  }
  // Re of sum_k a_k (Z1_k + i Z2_k) e^{-2 pi i j k / m}, j = 0..n-1.
  const auto f1 = fft_real(a1);
  const auto f2 = fft_real(a2);
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = f1[j].real() - f2[j].imag();
  return x;
}

// Durbin's recursion run alongside the draw: O(n^2) time, O(n) memory.
std::vector<double> durbin_sample(std::span<const double> gamma, Rng& rng) {
  const std::size_t n = gamma.size();
  std::vector<double> x(n), cur, next;
  double v = gamma[0];
  if (!(v > 0.0)) throw NumericError("Gaussian simulation: gamma(0) must be positive");
  x[0] = std::sqrt(v) * standard_normal(rng);
  for (std::size_t k = 1; k < n; ++k) {
    double num = gamma[k];
    for (std::size_t i = 1; i < k; ++i) num -= cur[i - 1] * gamma[k - i];
    const double kappa = num / v;
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) {
      throw NumericError("Gaussian simulation: autocovariance matrix is not positive definite "
                         "(leading minor " + std::to_string(k + 1) + ")");
    }
    next.assign(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) next[i - 1] = cur[i - 1] - kappa * cur[k - i - 1];
    next[k - 1] = kappa;
    cur.swap(next);
    v *= (1.0 - kappa * kappa);
    double mean = 0.0;
    for (std::size_t i = 1; i <= k; ++i) mean += cur[i - 1] * x[k - i];
    x[k] = mean + std::sqrt(v) * standard_normal(rng);
  }
  return x;
}

constexpr double kEmbeddingTol = 1e-10;

}  // namespace

bool circulant_embedding_ok(std::span<const double> gamma) {
  if (gamma.size() < 2) return false;
  const auto lam = embedding_eigenvalues(gamma);
  const double hi = *std::max_element(lam.begin(), lam.end());
  const double lo = *std::min_element(lam.begin(), lam.end());
  return hi > 0.0 && lo >= -kEmbeddingTol * hi;
}

namespace {
TimeSeries gaussian_from_acf(std::span<const double> gamma, Rng& rng, std::uint64_t seed,
                             const std::string& label) {
  std::vector<double> x;
  if (circulant_embedding_ok(gamma)) {
    x = circulant_sample(gamma, embedding_eigenvalues(gamma), rng);
  } else {
    x = durbin_sample(gamma, rng);
  }
  return TimeSeries(std::move(x), false, seed, "gaussian:" + label);
}
}  // namespace

TimeSeries gaussian_from_spectral(const SpectralFn& phi, std::size_t n, Rng& rng, std::uint64_t seed) {
  if (n < 8 || n > 8192) throw InvalidInput("gaussian_from_spectral supports 8 <= n <= 8192");
  const auto gamma = acf_from_spectral(phi, n - 1);
  return gaussian_from_acf(gamma, rng, seed, phi.label());
}

Preset parse_preset(const std::string& name) {
  if (name == "cantor-ma1") return Preset::cantor_ma1;
  if (name == "lipschitz-gauss") return Preset::lipschitz_gauss;
  throw InvalidInput("unknown preset '" + name + "' (expected cantor-ma1 or lipschitz-gauss)");
}

std::string preset_name(Preset p) {
  return p == Preset::cantor_ma1 ? "cantor-ma1" : "lipschitz-gauss";
}

namespace {
ArmaSpec cantor_spec() { return ArmaSpec{{}, {1.0 / 3.0}, InnovationSpec::cantor()}; }
}  // namespace

SpectralFn preset_truth(Preset p) {
  return p == Preset::cantor_ma1 ? cantor_spec().spectral_density() : SpectralFn::lipschitz_example();
}

std::vector<double> preset_acf(Preset p, std::size_t max_lag) {
  const auto truth = preset_truth(p);
  std::vector<double> g(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) g[k] = truth.exact_acf(k);
  return g;
}

TimeSeries simulate_preset(Preset p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  if (p == Preset::cantor_ma1) {
    auto ts = arma_simulate(cantor_spec(), n, rng, std::nullopt, seed);
    return TimeSeries(std::vector<double>(ts.values().begin(), ts.values().end()), true, seed,
                      preset_name(p));
  }
  if (n < 8 || n > 8192) throw InvalidInput("lipschitz-gauss supports 8 <= n <= 8192");
  auto ts = gaussian_from_acf(preset_acf(p, n - 1), rng, seed, preset_name(p));
  return TimeSeries(std::vector<double>(ts.values().begin(), ts.values().end()), false, seed,
                    preset_name(p));
}

}  // namespace bnpspec
