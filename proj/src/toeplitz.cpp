#include "bnpspec/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnpspec/errors.hpp"
#include "bnpspec/kernels.hpp"

namespace bnpspec {

namespace {
// Innovation variances below this fraction of gamma(0) are treated as a
// numerically singular recursion and trigger the Cholesky path.
constexpr double kLevinsonFloor = 1e-13;
constexpr double kTrimTol = 1e-16;
}  // namespace

ToeplitzMatrix::ToeplitzMatrix(std::span<const double> gamma, std::size_t n) : n_(n) {
  if (n == 0) throw InvalidInput("Toeplitz matrix needs n >= 1");
  if (gamma.size() < n) {
    throw InvalidInput("Toeplitz matrix of size " + std::to_string(n) + " needs " +
                       std::to_string(n) + " lags, got " + std::to_string(gamma.size()));
  }
  gamma_.assign(gamma.begin(), gamma.begin() + static_cast<std::ptrdiff_t>(n));
  for (double g : gamma_) {
    if (!std::isfinite(g)) throw InvalidInput("non-finite autocovariance");
  }
  if (!factorize_levinson()) factorize_cholesky();
}

bool ToeplitzMatrix::factorize_levinson() {
  if (!(gamma_[0] > 0.0)) return false;
  innov_.assign(n_, 0.0);
  row_offset_.assign(n_ + 1, 0);
  rows_.clear();
  std::vector<double> cur;  // phi_{k,1..k}
  std::vector<double> next;
  double v = gamma_[0];
  innov_[0] = v;
  log_det_ = std::log(v);
  for (std::size_t k = 1; k < n_; ++k) {
    double num = gamma_[k];
    for (std::size_t i = 1; i < k; ++i) num -= cur[i - 1] * gamma_[k - i];
    const double kappa = num / v;
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) return false;
    next.assign(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) next[i - 1] = cur[i - 1] - kappa * cur[k - i - 1];
    next[k - 1] = kappa;
    cur.swap(next);
    v *= (1.0 - kappa * kappa);
    if (!(v > kLevinsonFloor * gamma_[0])) return false;
    innov_[k] = v;
    log_det_ += std::log(v);

    double mass = 0.0;
    for (double c : cur) mass += std::abs(c);
    std::size_t len = cur.size();
    while (len > 0 && std::abs(cur[len - 1]) <= kTrimTol * mass) --len;
    row_offset_[k] = rows_.size();
    rows_.insert(rows_.end(), cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(len));
  }
  row_offset_[n_] = rows_.size();
  method_ = Method::levinson;
  return true;
}

void ToeplitzMatrix::factorize_cholesky() {
  chol_.assign(n_ * n_, 0.0);
  innov_.assign(n_, 0.0);
  rows_.clear();
  row_offset_.clear();
  log_det_ = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double d = gamma_[0];
    for (std::size_t k = 0; k < j; ++k) d -= chol_[j * n_ + k] * chol_[j * n_ + k];
    if (!(d > 0.0) || !std::isfinite(d)) {
      std::ostringstream msg;
      msg << "Toeplitz matrix is not positive definite: leading minor of order " << (j + 1)
          << " is non-positive";
      throw NumericError(msg.str());
    }
    const double ljj = std::sqrt(d);
    chol_[j * n_ + j] = ljj;
    innov_[j] = d;
    log_det_ += std::log(d);
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = gamma_[i - j];
      for (std::size_t k = 0; k < j; ++k) s -= chol_[i * n_ + k] * chol_[j * n_ + k];
      chol_[i * n_ + j] = s / ljj;
    }
  }
  method_ = Method::cholesky;
}

std::span<const double> ToeplitzMatrix::prediction_row(std::size_t k) const {
  if (method_ != Method::levinson) throw InvalidInput("prediction rows need the Levinson path");
  return std::span<const double>(rows_).subspan(row_offset_[k], row_offset_[k + 1] - row_offset_[k]);
}

std::vector<double> ToeplitzMatrix::matvec(std::span<const double> x) const {
  if (x.size() != n_) throw InvalidInput("Toeplitz matvec length mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += gamma_[i > j ? i - j : j - i] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> ToeplitzMatrix::solve(std::span<const double> b) const {
  if (b.size() != n_) throw InvalidInput("Toeplitz solve length mismatch");
  std::vector<double> x(n_);
  if (method_ == Method::levinson) {
    // T^{-1} b = A' V^{-1} A b
    std::vector<double> u(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const auto row = prediction_row(k);
      double e = b[k];
      for (std::size_t i = 0; i < row.size(); ++i) e -= row[i] * b[k - 1 - i];
      u[k] = e / innov_[k];
    }
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      const auto row = prediction_row(k);
      x[k] += u[k];
      for (std::size_t i = 0; i < row.size(); ++i) x[k - 1 - i] -= row[i] * u[k];
    }
    return x;
  }
  // L L' x = b
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_[i * n_ + k] * y[k];
    y[i] = s / chol_[i * n_ + i];
  }
  for (std::size_t i = n_; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n_; ++k) s -= chol_[k * n_ + i] * x[k];
    x[i] = s / chol_[i * n_ + i];
  }
  return x;
}

double ToeplitzMatrix::inverse_quadratic_form(std::span<const double> z) const {
  if (z.size() != n_) throw InvalidInput("Toeplitz quadratic form length mismatch");
  if (method_ == Method::levinson) {
    return kernels::innovations_quadratic_form({rows_, row_offset_, innov_}, z);
  }
  double acc = 0.0;
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = z[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol_[i * n_ + k] * y[k];
    y[i] = s / chol_[i * n_ + i];
    acc += y[i] * y[i];
  }
  return acc;
}

ToeplitzMatrix toeplitz_from_acf(std::span<const double> gamma, std::size_t n) {
  return ToeplitzMatrix(gamma, n);
}

}  // namespace bnpspec
