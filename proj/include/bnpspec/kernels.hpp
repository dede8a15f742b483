#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel`; the top-level
// entry points dispatch on problem size. Tests pin the parallel results to the
// serial ones and bench/bench_kernels.cpp times both.

#include <cstddef>
#include <span>
#include <vector>

namespace bnpspec::kernels {

/// Packed triangular rows as produced by Durbin's recursion.
struct InnovationRows {
  std::span<const double> coeffs;        // concatenated rows
  std::span<const std::size_t> offsets;  // size n+1
  std::span<const double> variances;     // v_0..v_{n-1}
};

/// Row-major matrix view.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

namespace serial {
/// sum_k (z_k - sum_i a_{k,i} z_{k-i})^2 / v_k
double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z);
/// out = A w
void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out);
/// sum_k ln(v_k)
double sum_log(std::span<const double> v);
}  // namespace serial

namespace parallel {
double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z);
void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out);
double sum_log(std::span<const double> v);
}  // namespace parallel

/// Work (multiply-adds) above which the dispatching entry points go parallel.
inline constexpr std::size_t kParallelWork = 1u << 18;

double innovations_quadratic_form(const InnovationRows& f, std::span<const double> z);
void matvec(const MatrixView& a, std::span<const double> w, std::span<double> out);

/// Beta(j, k-j+1) densities for j = 1..k at every point of `grid`, row-major
/// (grid.size() x k). Evaluated in log space.
std::vector<double> bernstein_basis(std::span<const double> grid, std::size_t k);
/// Same with the OpenMP loop over grid points.
std::vector<double> bernstein_basis_parallel(std::span<const double> grid, std::size_t k);

}  // namespace bnpspec::kernels
