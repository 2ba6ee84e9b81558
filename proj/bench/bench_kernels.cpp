// Serial reference versus OpenMP kernels. Each pair runs the same workload;
// the `threads` argument fixes the OpenMP team size for the parallel variant.

#include "thermo/kernels.hpp"
#include "thermo/random.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

using namespace thermo;

namespace {

LocallyConstantPotential sample_potential(const SystemPtr& sys, int depth) {
  Rng rng(17);
  const auto index = make_word_index(sys, depth);
  std::vector<double> v(index->size());
  for (auto& x : v) x = uniform(rng, -1.0, 1.0);
  return {index, v};
}

kernels::CocycleWeights sample_cocycle() {
  Rng rng(18);
  kernels::CocycleWeights c;
  for (int s = 0; s < 2; ++s) {
    Eigen::MatrixXd m(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) m.data()[i] = standard_normal(rng);
    c.generators.push_back(m);
  }
  c.alpha = {1.0, 0.5, 0.0};
  return c;
}

void set_threads(const benchmark::State& state) { omp_set_num_threads(static_cast<int>(state.range(0))); }

void BM_SupSums_Serial(benchmark::State& state) {
  const auto phi = sample_potential(full_shift(2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_sup_word_sums_serial(phi, 16));
}

void BM_SupSums_Parallel(benchmark::State& state) {
  set_threads(state);
  const auto phi = sample_potential(full_shift(2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_sup_word_sums_parallel(phi, 16));
}

void BM_CocycleSums_Serial(benchmark::State& state) {
  const auto sys = full_shift(2);
  const auto c = sample_cocycle();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cocycle_word_sums_serial(*sys, c, 12, nullptr));
}

void BM_CocycleSums_Parallel(benchmark::State& state) {
  set_threads(state);
  const auto sys = full_shift(2);
  const auto c = sample_cocycle();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cocycle_word_sums_parallel(*sys, c, 12, nullptr));
}

void BM_CycleMax_Serial(benchmark::State& state) {
  const auto phi = sample_potential(golden_mean_shift(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::best_cycle_average_serial(phi, 16, 1e-12));
}

void BM_CycleMax_Parallel(benchmark::State& state) {
  set_threads(state);
  const auto phi = sample_potential(golden_mean_shift(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::best_cycle_average_parallel(phi, 16, 1e-12));
}

void BM_Cylinders_Serial(benchmark::State& state) {
  const auto map = build_manneville_pomeau(0.5);
  const std::vector<double> shift{0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cylinder_sums_serial(map, 1.0, shift, 16));
}

void BM_Cylinders_Parallel(benchmark::State& state) {
  set_threads(state);
  const auto map = build_manneville_pomeau(0.5);
  const std::vector<double> shift{0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cylinder_sums_parallel(map, 1.0, shift, 16));
}

}  // namespace

BENCHMARK(BM_SupSums_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SupSums_Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CocycleSums_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CocycleSums_Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CycleMax_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CycleMax_Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Cylinders_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Cylinders_Parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
