// Copyright 2026 The exosim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "exosim/cli.hpp"
#include "exosim/dynamics.hpp"
#include "exosim/muscles.hpp"
#include "exosim/signals.hpp"

namespace {

using namespace exosim;

dynamics::Scenario admittance(double m) {
  return dynamics::parse_scenario({{"controller", {{"m", m}, {"kp", 1.0}, {"kd", 0.0}, {"c", 0.01}}}});
}

void BM_SimulatePassive(benchmark::State& state) {
  const auto sc = dynamics::parse_scenario({{"controller", {{"mode", "passive"}}}});
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::simulate(sc));
}
BENCHMARK(BM_SimulatePassive)->Unit(benchmark::kMillisecond);

void BM_SimulateAdmittance(benchmark::State& state) {
  const auto sc = admittance(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::simulate(sc));
}
BENCHMARK(BM_SimulateAdmittance)->Unit(benchmark::kMillisecond);

// Physics step sweep: cost should scale with 1/dt.
void BM_SimulateTimeStep(benchmark::State& state) {
  auto cfg = dynamics::to_json(admittance(0.01));
  cfg["sim"]["dt"] = 1e-4 / static_cast<double>(state.range(0));
  const auto sc = dynamics::parse_scenario(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::simulate(sc));
}
BENCHMARK(BM_SimulateTimeStep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto grid = cli::parse_sweep(
      {{"base", {{"controller", {{"c", 0.01}, {"kd", 0.0}}}}},
       {"grid", {{"m", {0.01, 0.1, 1.0, 10.0}}, {"kp", {0.5, 1.0}}}}});
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cli::run_sweep(grid, jobs));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MuscleSolve(benchmark::State& state) {
  const auto pr = muscles::make_problem(muscles::default_muscles(), 0.3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(muscles::solve_muscle_forces(pr));
}
BENCHMARK(BM_MuscleSolve)->Arg(2)->Arg(4);

void BM_MuscleOracle(benchmark::State& state) {
  const auto all = muscles::default_muscles();
  std::vector<muscles::Muscle> subset(all.begin(), all.begin() + state.range(0));
  const auto pr = muscles::make_problem(subset, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(muscles::brute_force_oracle(pr));
}
BENCHMARK(BM_MuscleOracle)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

signals::Channel noise(double fs, std::size_t n) {
  std::mt19937 rng(7);
  std::normal_distribution<double> d;
  signals::Channel c{fs, std::vector<double>(n), "V"};
  for (double& v : c.samples) v = d(rng);
  return c;
}

void BM_FiltFilt(benchmark::State& state) {
  const auto sos = signals::design_filter(4, 20.0, signals::FilterKind::highpass, 2000.0);
  const auto x = noise(2000.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(signals::filter_zero_phase(sos, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FiltFilt)->Arg(2000)->Arg(60000);

void BM_Resample(benchmark::State& state) {
  const auto x = noise(2000.0, 60000);
  for (auto _ : state) benchmark::DoNotOptimize(signals::resample(x, 350.0));
  state.SetItemsProcessed(state.iterations() * 60000);
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

void BM_RmsEnvelope(benchmark::State& state) {
  const auto x = signals::rectify(noise(350.0, 10500));
  for (auto _ : state) benchmark::DoNotOptimize(signals::rms_envelope(x));
}
BENCHMARK(BM_RmsEnvelope);

}  // namespace

BENCHMARK_MAIN();
