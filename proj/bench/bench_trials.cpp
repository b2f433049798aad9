#include <benchmark/benchmark.h>

#include "prap/experiments.hpp"
#include "prap/validators.hpp"

using namespace prap;

namespace {

GridSpec grid_spec() {
  GridSpec spec;
  spec.layout.n_values = {16};
  spec.layout.m_rule = MRule{6.0, 1};
  spec.trials = 32;
  spec.master_seed = 1;
  spec.solver.init_mode = InitMode::random_isotropic;
  return spec;
}

StagnationSpec stagnation_spec() {
  StagnationSpec spec;
  spec.layout.n_values = {3};
  spec.layout.m_values = {12};
  spec.instances = 16;
  spec.inits_per_instance = 20;
  spec.master_seed = 1;
  return spec;
}

void BM_GridSerial(benchmark::State& state) {
  const GridSpec spec = grid_spec();
  for (auto _ : state) benchmark::DoNotOptimize(run_success_grid_serial(spec));
}

void BM_GridParallel(benchmark::State& state) {
  const GridSpec spec = grid_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_success_grid(spec, static_cast<int>(state.range(0))));
  }
}

void BM_StagnationSerial(benchmark::State& state) {
  const StagnationSpec spec = stagnation_spec();
  for (auto _ : state) benchmark::DoNotOptimize(probe_stagnation_serial(spec));
}

void BM_StagnationParallel(benchmark::State& state) {
  const StagnationSpec spec = stagnation_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(probe_stagnation(spec, static_cast<int>(state.range(0))));
  }
}

void BM_DiffPhaseSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(validate_diff_phase_serial(200000, 1));
}

void BM_DiffPhaseParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_diff_phase(200000, 1, static_cast<int>(state.range(0))));
  }
}

void BM_MinFSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(validate_min_f_serial({1.0}, 200000, 1));
}

void BM_MinFParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_min_f({1.0}, 200000, 1, static_cast<int>(state.range(0))));
  }
}

}  // namespace

BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StagnationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StagnationParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiffPhaseSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffPhaseParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MinFSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinFParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
