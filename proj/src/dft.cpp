#include "bnpspec/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "bnpspec/errors.hpp"

namespace bnpspec {
namespace {

using std::numbers::pi;

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per length under a lock and live for the process.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

  const PlanPair& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* re = fftw_alloc_real(n);
    auto* co = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(len, re, co, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_1d(len, co, re, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(re);
    fftw_free(co);
    if (!p.r2c || !p.c2r) throw NumericError("FFTW planning failed for n=" + std::to_string(n));
    return plans_.emplace(n, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void check_length(std::size_t n) {
  if (n < 2) throw InvalidInput("real DFT needs length >= 2, got " + std::to_string(n));
}

}  // namespace

void real_dft_apply(std::span<const double> x, std::span<double> out, DftDirection direction) {
  const std::size_t n = x.size();
  check_length(n);
  if (out.size() != n) throw InvalidInput("real DFT output length mismatch");
  const auto& plans = plan_cache().get(n);
  const std::size_t half = n / 2 + 1;
  const std::size_t pairs = (n - 1) / 2;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));

  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(half);
  auto* fspec = reinterpret_cast<fftw_complex*>(spec.data());

  if (direction == DftDirection::forward) {
    std::copy(x.begin(), x.end(), real.begin());
    fftw_execute_dft_r2c(plans.r2c, real.data(), fspec);
    // FFTW sums over s = t-1; shift to t = 1..n.
    out[0] = spec[0].real() / root_n;
    for (std::size_t j = 1; j <= pairs; ++j) {
      const double w = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
      const std::complex<double> xj = spec[j] * std::complex<double>(std::cos(w), -std::sin(w));
      out[2 * j - 1] = scale * xj.real();
      out[2 * j] = -scale * xj.imag();
    }
    if (n % 2 == 0) out[n - 1] = -spec[n / 2].real() / root_n;
  } else {
    // x_t = A_0 + sum_j A_j cos(w_j t) + B_j sin(w_j t) [+ A_{n/2} (-1)^t]
    // as a c2r transform over s = t-1.
    spec[0] = x[0] / root_n;
    for (std::size_t j = 1; j <= pairs; ++j) {
      const double w = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
      const std::complex<double> ab(scale * x[2 * j - 1], -scale * x[2 * j]);
      spec[j] = 0.5 * ab * std::complex<double>(std::cos(w), std::sin(w));
    }
    if (n % 2 == 0) spec[n / 2] = -x[n - 1] / root_n;
    fftw_execute_dft_c2r(plans.c2r, fspec, real.data());
    std::copy(real.begin(), real.end(), out.begin());
  }
}

std::vector<double> real_dft_apply(std::span<const double> x, DftDirection direction) {
  std::vector<double> out(x.size());
  real_dft_apply(x, out, direction);
  return out;
}

std::vector<double> real_dft_matrix(std::size_t n) {
  check_length(n);
  if (n > kDenseCap) throw InvalidInput("dense DFT matrix capped at n=512");
  std::vector<double> f(n * n);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  const std::size_t pairs = (n - 1) / 2;
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t col = t - 1;
    f[col] = 1.0 / root_n;
    for (std::size_t j = 1; j <= pairs; ++j) {
      const double w = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
      f[(2 * j - 1) * n + col] = scale * std::cos(w * static_cast<double>(t));
      f[(2 * j) * n + col] = scale * std::sin(w * static_cast<double>(t));
    }
    if (n % 2 == 0) f[(n - 1) * n + col] = (t % 2 == 0 ? 1.0 : -1.0) / root_n;
  }
  return f;
}

std::vector<double> real_dft_apply_dense(std::span<const double> x, DftDirection direction) {
  const std::size_t n = x.size();
  const auto f = real_dft_matrix(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double a = direction == DftDirection::forward ? f[r * n + c] : f[c * n + r];
      out[r] += a * x[c];
    }
  }
  return out;
}

std::vector<std::complex<double>> fft_real(std::span<const double> x) {
  const std::size_t n = x.size();
  check_length(n);
  const auto& plans = plan_cache().get(n);
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace bnpspec
