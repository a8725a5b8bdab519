#include <benchmark/benchmark.h>

#include <numeric>

#include "smcsim/experiment.hpp"

using namespace smcsim;

namespace {

void simulate_pendulum(benchmark::State& state) {
  const ExperimentSpec spec = pendulum_preset();
  const ControllerSpec& c = spec.controller("proposed");
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec.scenario, c));
}
BENCHMARK(simulate_pendulum)->Unit(benchmark::kMillisecond);

void simulate_tank(benchmark::State& state) {
  const ExperimentSpec spec = tank_preset();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec.scenario, spec.controllers.front()));
}
BENCHMARK(simulate_tank)->Unit(benchmark::kMillisecond);

void pendulum_ise_objective(benchmark::State& state) {
  const ExperimentSpec spec = pendulum_preset();
  const std::vector<std::string> names{"kp", "ki", "kd", "k", "k_sc"};
  const std::vector<double> values{105.0, 4.0, 0.8, 35.0, 1.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ise_objective(spec.scenario, spec.controller("proposed"), names, values));
  }
}
BENCHMARK(pendulum_ise_objective)->Unit(benchmark::kMillisecond);

void mpso_sphere(benchmark::State& state) {
  SwarmConfig c;
  c.bounds.assign(static_cast<std::size_t>(state.range(0)), Bounds{-5.0, 5.0});
  const auto sphere = [](std::span<const double> x) {
    return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  };
  for (auto _ : state) benchmark::DoNotOptimize(optimize(sphere, c));
}
BENCHMARK(mpso_sphere)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
