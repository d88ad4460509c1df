/* Copyright 2026 The eteflow Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <benchmark/benchmark.h>

#include "ete/contributions.hpp"
#include "ete/ensemble.hpp"
#include "ete/model_io.hpp"

namespace {

const ete::ModelFile& fmo() {
  static const auto f = ete::load_model_file(ETE_BENCH_MODEL);
  return f;
}

ete::DensityMatrix rho0() { return ete::initial_state(fmo().model, fmo().initial_state); }

void BM_Assemble(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ete::assemble(fmo().model));
}
BENCHMARK(BM_Assemble)->Unit(benchmark::kMicrosecond);

void BM_EteGreens(benchmark::State& state) {
  const auto L = ete::assemble(fmo().model);
  const auto r = rho0();
  for (auto _ : state) benchmark::DoNotOptimize(ete::ete_greens(L, r));
}
BENCHMARK(BM_EteGreens)->Unit(benchmark::kMicrosecond);

void BM_GreensContributions(benchmark::State& state) {
  const auto L = ete::assemble(fmo().model);
  const auto r = rho0();
  const auto scheme = state.range(0) ? ete::pathway_scheme(7) : ete::default_scheme();
  for (auto _ : state) benchmark::DoNotOptimize(ete::greens_contributions(L, r, scheme));
}
BENCHMARK(BM_GreensContributions)->Arg(0)->Arg(1)->ArgName("pathways")->Unit(benchmark::kMicrosecond);

void BM_Propagate(benchmark::State& state) {
  const auto L = ete::assemble(fmo().model);
  const auto r = rho0();
  const double horizon = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ete::propagate(L, r, horizon, ete::uniform_grid(0.0, horizon, 1.0)));
}
BENCHMARK(BM_Propagate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Susceptibility(benchmark::State& state) {
  const auto L = ete::assemble(fmo().model);
  const auto r = rho0();
  const auto scheme = ete::default_scheme(ete::SchemeTarget::full);
  for (auto _ : state) benchmark::DoNotOptimize(ete::susceptibility_contributions(L, r, scheme));
}
BENCHMARK(BM_Susceptibility)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_DisorderSweep(benchmark::State& state) {
  ete::SweepSpec spec;
  spec.parameter = ete::SweepParameter::reorganization_energy;
  spec.grid = {35.0};
  spec.disorder = {100, ete::kDefaultSeed};
  spec.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ete::run_sweep(fmo().model, fmo().initial_state, spec));
}
BENCHMARK(BM_DisorderSweep)->Arg(1)->Arg(4)->ArgName("threads")->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
