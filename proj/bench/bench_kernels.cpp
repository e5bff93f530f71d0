// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>

#include "rstab/geometry.hpp"
#include "rstab/kernels.hpp"
#include "rstab/minimizer.hpp"

namespace {

rstab::Configuration sample(std::size_t n, int d) {
  return rstab::random_configuration(n, rstab::Box{d, 1.0, {}}, 42);
}

void BM_riesz_serial(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(rstab::kernels::serial::riesz(g.coordinates(), 3, 1.5).energy);
  state.SetComplexityN(state.range(0));
}

void BM_riesz_omp(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(rstab::kernels::omp::riesz(g.coordinates(), 3, 1.5).energy);
  state.SetComplexityN(state.range(0));
}

void BM_gradient_omp(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(rstab::riesz_gradient(g, 1.5));
}

void BM_pair_sum_serial(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)), 2);
  const auto f = [](double r) { return std::exp(-r) / r; };
  for (auto _ : state) benchmark::DoNotOptimize(rstab::kernels::serial::pair_sum(g.coordinates(), 2, f).value);
}

void BM_pair_sum_omp(benchmark::State& state) {
  const auto g = sample(static_cast<std::size_t>(state.range(0)), 2);
  const auto f = [](double r) { return std::exp(-r) / r; };
  for (auto _ : state) benchmark::DoNotOptimize(rstab::kernels::omp::pair_sum(g.coordinates(), 2, f).value);
}

}  // namespace

BENCHMARK(BM_riesz_serial)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_riesz_omp)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_gradient_omp)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_pair_sum_serial)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_pair_sum_omp)->RangeMultiplier(4)->Range(64, 4096);

BENCHMARK_MAIN();
