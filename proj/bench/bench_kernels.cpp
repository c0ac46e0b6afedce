#include <benchmark/benchmark.h>

#include <random>

#include "gaia/kernels.hpp"
#include "gaia/matrix.hpp"

namespace {

using gaia::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (double& v : m.values()) v = g(rng);
  return m;
}

template <auto Kernel>
void gemm_nn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  Matrix c(n, n);
  for (auto _ : state) {
    Kernel(a, b, c);
    benchmark::DoNotOptimize(c.values().data());
  }
  state.counters["GFLOPS"] =
      benchmark::Counter(2.0 * static_cast<double>(n * n * n), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

template <auto Kernel>
void gemm_tn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(64, n, 1), b = random_matrix(64, n, 2);
  Matrix c(n, n);
  for (auto _ : state) {
    Kernel(a, b, c);
    benchmark::DoNotOptimize(c.values().data());
  }
}

template <auto Kernel>
void pairwise(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 2, 1), b = random_matrix(n, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
}

template <auto Kernel>
void knn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 2, 1), b = random_matrix(n, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b, 5, false));
}

template <auto Kernel>
void kde(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 2, 1), b = random_matrix(n, 2, 2);
  const std::vector<double> bw{0.3, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b, bw));
}

namespace s = gaia::kernels::serial;
namespace p = gaia::kernels::parallel;

BENCHMARK(gemm_nn<s::gemm_nn>)->Name("gemm_nn/serial")->Arg(64)->Arg(256);
BENCHMARK(gemm_nn<p::gemm_nn>)->Name("gemm_nn/parallel")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(gemm_tn<s::gemm_tn>)->Name("gemm_tn/serial")->Arg(64)->Arg(256);
BENCHMARK(gemm_tn<p::gemm_tn>)->Name("gemm_tn/parallel")->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK(pairwise<s::pairwise_sq_dists>)->Name("pairwise_sq_dists/serial")->Arg(2000);
BENCHMARK(pairwise<p::pairwise_sq_dists>)->Name("pairwise_sq_dists/parallel")->Arg(2000)->UseRealTime();
BENCHMARK(knn<s::kth_neighbor_distances>)->Name("kth_neighbor/serial")->Arg(2000);
BENCHMARK(knn<p::kth_neighbor_distances>)->Name("kth_neighbor/parallel")->Arg(2000)->UseRealTime();
BENCHMARK(kde<s::kde_log_density>)->Name("kde_log_density/serial")->Arg(2000);
BENCHMARK(kde<p::kde_log_density>)->Name("kde_log_density/parallel")->Arg(2000)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
