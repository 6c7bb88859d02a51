#include <benchmark/benchmark.h>

#include <omp.h>

#include "ffgrad/bench.hpp"
#include "ffgrad/kernels.hpp"

using namespace ffgrad;

namespace {

struct Fixture {
  PulseSequence pulse;
  FrequencyGrid grid;
};

Fixture make(const benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  return {bench::random_pulse(d, 1, 2, 2, 1, 1), FrequencyGrid::logarithmic(1e-2, 1e2, 200)};
}

void threads_label(benchmark::State& state, int threads) {
  state.SetLabel("threads=" + std::to_string(threads));
}

void BM_SegmentControlMatrix_Reference(benchmark::State& state) {
  const Fixture f = make(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::segment_control_matrix(f.pulse, 0, f.grid));
}

void BM_SegmentControlMatrix_Parallel(benchmark::State& state) {
  const Fixture f = make(state);
  threads_label(state, omp_get_max_threads());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::segment_control_matrix(f.pulse, 0, f.grid));
}

void BM_SegmentDerivative_Reference(benchmark::State& state) {
  const Fixture f = make(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::reference::segment_control_matrix_derivative(f.pulse, 0, f.grid));
}

void BM_SegmentDerivative_Parallel(benchmark::State& state) {
  const Fixture f = make(state);
  threads_label(state, omp_get_max_threads());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::segment_control_matrix_derivative(f.pulse, 0, f.grid));
}

void BM_SegmentDerivative_SingleThread(benchmark::State& state) {
  const Fixture f = make(state);
  kernels::ThreadLimit one(1);
  threads_label(state, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::segment_control_matrix_derivative(f.pulse, 0, f.grid));
}

}  // namespace

BENCHMARK(BM_SegmentControlMatrix_Reference)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SegmentControlMatrix_Parallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SegmentDerivative_Reference)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SegmentDerivative_Parallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SegmentDerivative_SingleThread)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
