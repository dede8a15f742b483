#include "bnpspec/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace bnpspec::kernels {

namespace {

inline double innovation_term(const InnovationRows& f, std::span<const double> z, std::size_t k) {
  const std::size_t begin = f.offsets[k];
  const std::size_t len = f.offsets[k + 1] - begin;
  double e = z[k];
  for (std::size_t i = 0; i < len; ++i) e -= f.coeffs[begin + i] * z[k - 1 - i];
  return e * e / f.variances[k];
}

inline void basis_row(double x, std::size_t k, std::span<const double> log_binom, double* out) {
  // beta(x; j, k-j+1) = k * C(k-1, j-1) x^{j-1} (1-x)^{k-j}
  const double lk = std::log(static_cast<double>(k));
  if (x <= 0.0) {
    for (std::size_t j = 0; j < k; ++j) out[j] = 0.0;
    out[0] = static_cast<double>(k);
    return;
  }
  if (x >= 1.0) {
    for (std::size_t j = 0; j < k; ++j) out[j] = 0.0;
    out[k - 1] = static_cast<double>(k);
    return;
  }
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = std::exp(lk + log_binom[j] + static_cast<double>(j) * lx +
                      static_cast<double>(k - 1 - j) * l1x);
  }
}

std::vector<double> log_binomials(std::size_t k) {
  std::vector<double> lb(k);
  const double top = std::lgamma(static_cast<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    lb[j] = top - std::lgamma(static_cast<double>(j) + 1.0) -
            std::lgamma(static_cast<double>(k - j));
  }
  return lb;
}

}  // namespace

namespace serial {

double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z) {
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) acc += innovation_term(f, z, k);
  return acc;
}

void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* row = a.data.data() + r * a.cols;
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) s += row[c] * w[c];
    out[r] = s;
  }
}

double sum_log(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::log(x);
  return s;
}

}  // namespace serial

namespace parallel {

double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z) {
  double acc = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) acc += innovation_term(f, z, static_cast<std::size_t>(k));
  return acc;
}

void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const double* row = a.data.data() + static_cast<std::size_t>(r) * a.cols;
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) s += row[c] * w[c];
    out[static_cast<std::size_t>(r)] = s;
  }
}

double sum_log(std::span<const double> v) {
  double s = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) s += std::log(v[static_cast<std::size_t>(i)]);
  return s;
}

}  // namespace parallel

namespace {
bool go_parallel(std::size_t work) {
  return work >= kParallelWork && !omp_in_parallel() && omp_get_max_threads() > 1;
}
}  // namespace

double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z) {
  if (go_parallel(f.coeffs.size())) return parallel::innovations_quadratic_form(f, z);
  return serial::innovations_quadratic_form(f, z);
}

void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out) {
  if (go_parallel(a.rows * a.cols)) {
    parallel::matvec(a, w, out);
  } else {
    serial::matvec(a, w, out);
  }
}

std::vector<double> bernstein_basis(std::span<const double> grid, std::size_t k) {
  std::vector<double> out(grid.size() * k);
  const auto lb = log_binomials(k);
  for (std::size_t i = 0; i < grid.size(); ++i) basis_row(grid[i], k, lb, out.data() + i * k);
  return out;
}

std::vector<double> bernstein_basis_parallel(std::span<const double> grid, std::size_t k) {
  std::vector<double> out(grid.size() * k);
  const auto lb = log_binomials(k);
  const auto m = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    basis_row(grid[static_cast<std::size_t>(i)], k, lb, out.data() + static_cast<std::size_t>(i) * k);
  }
  return out;
}

}  // namespace bnpspec::kernels
