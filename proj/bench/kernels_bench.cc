// Copyright 2026 The DMC Authors. All Rights Reserved.
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

// Serial reference kernels against the OpenMP kernels, and a full engine
// iteration with one worker against all available workers.

#include <random>

#include <benchmark/benchmark.h>

#include "dmc/data.h"
#include "dmc/engine.h"
#include "dmc/matrix.h"
#include "dmc/serial.h"

namespace dmc {
namespace {

Dense Random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dense out(rows, cols);
  for (double& v : out.values()) v = normal(rng);
  return out;
}

template <Dense (*Kernel)(const Dense&, const Dense&)>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dense a = Random(n, 64, 1), b = Random(64, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetItemsProcessed(state.iterations() * n * n * 64);
}
BENCHMARK(BM_Matmul<serial::matmul>)->Name("matmul/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Matmul<matmul>)->Name("matmul/openmp")->Arg(128)->Arg(512);

template <Dense (*Kernel)(const Dense&)>
void BM_Gram(benchmark::State& state) {
  const Dense a = Random(static_cast<std::size_t>(state.range(0)), 64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a));
}
BENCHMARK(BM_Gram<serial::gram>)->Name("gram/serial")->Arg(1000)->Arg(4000);
BENCHMARK(BM_Gram<gram>)->Name("gram/openmp")->Arg(1000)->Arg(4000);

// One engine iteration at rank 64 on 8 agents; the argument is the worker
// count, 0 meaning every available thread.
void BM_Iteration(benchmark::State& state) {
  const SyntheticData d = synth_low_rank({400, 480, 8, 0.3, 0.0, 1});
  const Topology topology = ring(8);
  EngineConfig config;
  config.rank = 64;
  config.workers = static_cast<std::size_t>(state.range(0));
  auto agents = init_agents(partition_columns(d.ratings, 8), topology, config);
  std::size_t t = 0;
  for (auto _ : state) run_iteration(agents, topology, config, ++t);
}
BENCHMARK(BM_Iteration)->Name("iteration/workers")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dmc

BENCHMARK_MAIN();
