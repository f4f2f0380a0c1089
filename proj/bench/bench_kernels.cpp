// Serial reference vs OpenMP kernels: trajectory sampling and batch synthesis.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "dephasing/dynamics.hpp"
#include "dephasing/synthesis.hpp"

namespace {

using namespace dephasing;

const BlochState kInitial(std::sqrt(0.3), 0.0, std::sqrt(0.5));

ControlSchedule example_schedule() {
  return synthesize({0.1, kInitial, 20.0, 0.2}).schedule;
}

void BM_SimulateSerial(benchmark::State& state) {
  const ControlSchedule schedule = example_schedule();
  const double step = 20.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_serial(schedule, kInitial, 0.1, step));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateOpenMP(benchmark::State& state) {
  const ControlSchedule schedule = example_schedule();
  const double step = 20.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(schedule, kInitial, 0.1, step));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<SynthesisProblem> random_problems(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SynthesisProblem> out;
  out.reserve(n);
  while (out.size() < n) {
    const double c = 0.05 + 0.8 * unit(rng);
    const double p = c + 0.05 + (0.95 - c - 0.05) * unit(rng);
    if (p <= c + 0.05) continue;
    const double theta = 2.0 * M_PI * unit(rng);
    const BlochState s(std::sqrt(c) * std::cos(theta), std::sqrt(c) * std::sin(theta),
                       std::sqrt(p - c));
    const double gamma = 0.01 + unit(rng);
    out.push_back({gamma, s, (1.0 + 3.0 * unit(rng)) * (p - c) / (gamma * c), std::nullopt});
  }
  return out;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto problems = random_problems(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_batch_serial(problems));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchOpenMP(benchmark::State& state) {
  const auto problems = random_problems(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_batch(problems));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(2000)->Arg(200000);
BENCHMARK(BM_SimulateOpenMP)->Arg(2000)->Arg(200000);
BENCHMARK(BM_BatchSerial)->Arg(64);
BENCHMARK(BM_BatchOpenMP)->Arg(64);

BENCHMARK_MAIN();
