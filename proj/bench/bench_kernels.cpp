#include <benchmark/benchmark.h>

#include "rombit/extraction.hpp"
#include "rombit/harness.hpp"
#include "rombit/string_guess.hpp"

using namespace rombit;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_ExactBias(benchmark::State& state) {
  const auto keys = centered_type_keys(9, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(exact_bias(keys, ExtractionMode::combine, exec_of(state)));
  label(state);
}

void BM_ExactExpectedCorrect(benchmark::State& state) {
  const std::vector<int> bits{1, 0, 1, 1, 0, 1, 0, 0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(exact_expected_correct(bits, exec_of(state)));
  label(state);
}

void BM_RunInstance(benchmark::State& state, Problem problem) {
  const auto inst = generate_instances(problem, "random-uniform", {{"n", "7"}}, 1, 5).front();
  ExperimentConfig cfg;
  cfg.audits = true;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_instance(inst, cfg));
  label(state);
}

void BM_MonteCarloBias(benchmark::State& state) {
  const auto keys = distinct_keys(100000);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        empirical_bias(keys, ExtractionMode::distinct_unbiased, 20000, 1, {}, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_ExactBias)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactExpectedCorrect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunInstance, knapsack, Problem::knapsack_general)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunInstance, intervals, Problem::interval)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunInstance, throughput, Problem::throughput)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloBias)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
