// Copyright (c) the erwsim authors
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

#include "erw/coupling.hpp"
#include "erw/oracle.hpp"
#include "erw/regen.hpp"
#include "erw/walk.hpp"

namespace {

using namespace erw;

void BM_KeyedUniform(benchmark::State& state) {
  const SeedKey key{123, 1};
  const uint64_t stream = key.stream_word();
  uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(keyed_uniform(stream, 5, 0, ++index));
  }
}
BENCHMARK(BM_KeyedUniform);

void BM_SimulateErw(benchmark::State& state) {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const int64_t n = state.range(0);
  uint64_t replica = 0;
  for (auto _ : state) {
    const WalkPath path = simulate_erw(env, SeedKey{7, replica++}, n);
    benchmark::DoNotOptimize(path.positions.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SimulateErw)->Arg(1000)->Arg(100000);

void BM_SimulateCoupled(benchmark::State& state) {
  const auto kernel = CouplingKernel::compile(
      KernelSpec::swap(1, 2), CookieEnvironment::finite({0.7, 0.9, 0.9}));
  const int64_t n = state.range(0);
  uint64_t replica = 0;
  for (auto _ : state) {
    const CoupledSample s = simulate_coupled(kernel, SeedKey{8, replica++}, n);
    benchmark::DoNotOptimize(s.r_path.positions.back());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_SimulateCoupled)->Arg(1000)->Arg(100000);

void BM_FindRegenerations(benchmark::State& state) {
  const auto env = CookieEnvironment::finite({0.9, 0.9, 0.9});
  const WalkPath path = simulate_erw(env, SeedKey{9, 0}, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_regenerations(path, 50).levels.size());
  }
}
BENCHMARK(BM_FindRegenerations)->Arg(100000);

void BM_ExactPathDistribution(benchmark::State& state) {
  const auto env = CookieEnvironment::finite({0.7, 0.9, 0.9});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_path_distribution(env, n).prob.size());
  }
}
BENCHMARK(BM_ExactPathDistribution)->Arg(10)->Arg(16);

void BM_ExactCoupledDistribution(benchmark::State& state) {
  const auto kernel = CouplingKernel::compile(
      KernelSpec::swap(1, 2), CookieEnvironment::finite({0.7, 0.9}));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_coupled_distribution(kernel, n).atoms.size());
  }
}
BENCHMARK(BM_ExactCoupledDistribution)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
