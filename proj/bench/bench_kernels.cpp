#include <benchmark/benchmark.h>

#include <cstddef>
#include <random>
#include <vector>

#include "bnpspec/kernels.hpp"
#include "bnpspec/bernstein.hpp"

namespace {

using namespace bnpspec;

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

// Full triangular rows of the size Durbin's recursion produces for an n-point series.
struct Rows {
  std::vector<double> coeffs;
  std::vector<std::size_t> offsets;
  std::vector<double> variances;

  explicit Rows(std::size_t n) : offsets(n + 1, 0) {
    for (std::size_t k = 0; k < n; ++k) offsets[k + 1] = offsets[k] + k;
    coeffs = random_vector(offsets[n], 1, -0.01, 0.01);
    variances = random_vector(n, 2, 0.5, 1.5);
  }
  kernels::InnovationRows view() const { return {coeffs, offsets, variances}; }
};

template <bool Parallel>
void BM_innovations_quadratic_form(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Rows rows(n);
  const auto z = random_vector(n, 3);
  for (auto _ : state) {
    const double q = Parallel ? kernels::parallel::innovations_quadratic_form(rows.view(), z)
                              : kernels::serial::innovations_quadratic_form(rows.view(), z);
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.offsets[n]));
}

template <bool Parallel>
void BM_matvec(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 200;
  const auto a = random_vector(rows * cols, 4);
  const auto w = random_vector(cols, 5);
  std::vector<double> out(rows);
  const kernels::MatrixView view{a, rows, cols};
  for (auto _ : state) {
    if (Parallel)
      kernels::parallel::matvec(view, w, out);
    else
      kernels::serial::matvec(view, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows * cols));
}

template <bool Parallel>
void BM_sum_log(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 6, 0.1, 10.0);
  for (auto _ : state) {
    const double s = Parallel ? kernels::parallel::sum_log(v) : kernels::serial::sum_log(v);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_bernstein_basis(benchmark::State& state) {
  const auto grid = unit_grid(static_cast<std::size_t>(state.range(0)));
  const std::size_t k = 64;
  for (auto _ : state) {
    auto b = Parallel ? kernels::bernstein_basis_parallel(grid, k) : kernels::bernstein_basis(grid, k);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size() * k));
}

}  // namespace

BENCHMARK(BM_innovations_quadratic_form<false>)->Name("quadratic_form/serial")->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_innovations_quadratic_form<true>)->Name("quadratic_form/parallel")->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_matvec<false>)->Name("matvec/serial")->Arg(257)->Arg(4097);
BENCHMARK(BM_matvec<true>)->Name("matvec/parallel")->Arg(257)->Arg(4097);
BENCHMARK(BM_sum_log<false>)->Name("sum_log/serial")->Arg(1024)->Arg(1 << 16);
BENCHMARK(BM_sum_log<true>)->Name("sum_log/parallel")->Arg(1024)->Arg(1 << 16);
BENCHMARK(BM_bernstein_basis<false>)->Name("bernstein_basis/serial")->Arg(257)->Arg(4097);
BENCHMARK(BM_bernstein_basis<true>)->Name("bernstein_basis/parallel")->Arg(257)->Arg(4097);

BENCHMARK_MAIN();
