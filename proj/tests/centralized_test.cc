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

#include "dmc/centralized.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace dmc {
namespace {

EngineConfig Config(std::size_t rank, std::size_t iterations) {
  EngineConfig c;
  c.rank = rank;
  c.iterations = iterations;
  return c;
}

// With every cell observed and U spanning the column space of the truth, one
// sweep reproduces the ratings exactly.
TEST(CentralStepTest, TruthIsAFixedPoint) {
  const SyntheticData d = synth_low_rank({12, 10, 3, 1.0, 0.0, 4});
  const EngineConfig c = Config(3, 1);
  CentralState s = init_central(d.ratings, c);
  central_step(s, d.ratings.mask(), d.ratings.values(), c.ridge);
  EXPECT_LE(central_objective(s), 1e-20);
  const Dense u_truth = s.u;
  CentralState again = init_central(d.ratings, c, u_truth);
  central_step(again, d.ratings.mask(), d.ratings.values(), c.ridge);
  EXPECT_LE(central_objective(again), 1e-20);
  for (const Rating& e : d.ratings.entries()) {
    double pred = 0.0;
    for (std::size_t p = 0; p < 3; ++p) pred += again.u(e.user, p) * again.v(p, e.item);
    EXPECT_NEAR(pred, e.value, 1e-10 * (1.0 + std::abs(e.value)));
  }
}

TEST(CentralStepTest, VStepEqualsTheAgentVStep) {
  const SyntheticData d = synth_low_rank({15, 12, 2, 0.5, 0.0, 8});
  const EngineConfig c = Config(2, 1);
  CentralState s = init_central(d.ratings, c);
  auto agents = init_agents(partition_columns(d.ratings, 1), ring(1), c);
  ASSERT_EQ(agents[0].u, s.u);
  central_step(s, d.ratings.mask(), d.ratings.values(), c.ridge);
  step_v(agents[0], c.ridge);
  EXPECT_EQ(agents[0].v, s.v);
}

TEST(CentralStepTest, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SyntheticData d = synth_low_rank({25, 30, 4, 0.4, 0.1, seed});
    const EngineConfig c = Config(4, 1);
    CentralState s = init_central(d.ratings, c);
    double before = central_objective(s);
    for (int sweep = 0; sweep < 40; ++sweep) {
      central_step(s, d.ratings.mask(), d.ratings.values(), c.ridge);
      const double after = central_objective(s);
      ASSERT_LE(after, before + 1e-12 * (1.0 + before)) << "sweep " << sweep;
      before = after;
      for (const Rating& e : d.ratings.entries()) ASSERT_EQ(s.z(e.user, e.item), e.value);
    }
  }
}

TEST(CentralRunTest, ZeroIterationsReturnsTheInitialization) {
  const SyntheticData d = synth_low_rank({10, 10, 2, 0.5, 0.0, 2});
  const EngineConfig c = Config(2, 0);
  const CentralState init = init_central(d.ratings, c);
  const CentralRunResult r = central_run(d.ratings, c);
  EXPECT_EQ(r.iterations_run, 0u);
  EXPECT_TRUE(r.series.empty());
  EXPECT_EQ(r.state.u, init.u);
  EXPECT_EQ(r.state.v, init.v);
  EXPECT_EQ(r.state.z, init.z);
}

TEST(CentralRunTest, DeterministicPerSeed) {
  const SyntheticData d = synth_low_rank({20, 24, 3, 0.5, 0.0, 6});
  EngineConfig c = Config(3, 20);
  const CentralRunResult a = central_run(d.ratings, c);
  const CentralRunResult b = central_run(d.ratings, c);
  EXPECT_EQ(a.state.u, b.state.u);
  EXPECT_EQ(a.state.v, b.state.v);
  c.seed = 2;
  EXPECT_NE(central_run(d.ratings, c).state.u, a.state.u);
}

TEST(CentralRunTest, SeriesHasTheSharedShape) {
  const SyntheticData d = synth_low_rank({20, 24, 3, 0.5, 0.0, 6});
  const SplitDataset s = split(d.ratings, 0.75, 1);
  RunOptions options;
  options.test = &s.test;
  std::size_t rows = 0;
  options.sink = [&](const IterationMetrics&) { ++rows; };
  const CentralRunResult r = central_run(s.train, Config(3, 7), options);
  EXPECT_EQ(rows, 7u);
  for (const IterationMetrics& m : r.series) {
    EXPECT_EQ(m.consensus_gap, 0.0);
    EXPECT_EQ(m.dual_sum_norm, 0.0);
    EXPECT_TRUE(std::isfinite(m.test_rmse));
  }
}

TEST(CentralRunTest, StopsOnRelativeObjectiveChange) {
  const SyntheticData d = synth_low_rank({20, 24, 3, 0.6, 0.0, 6});
  EngineConfig c = Config(3, 1000);
  c.stop_tolerance = 1e-6;
  const CentralRunResult r = central_run(d.ratings, c);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.iterations_run, 1000u);
}

// A single agent in exact mode has no neighbors, so its U-step is the same
// least-squares solve as the centralized sweep.
TEST(LockStepTest, SingleAgentExactModeTracksTheCentralSolver) {
  const SyntheticData d = synth_low_rank({50, 60, 4, 0.5, 0.0, 12});
  EngineConfig c = Config(4, 1);
  c.mode = UpdateMode::kExact;
  c.ridge = 0.0;
  auto agents = init_agents(partition_columns(d.ratings, 1), ring(1), c);
  CentralState s = init_central(d.ratings, c, agents[0].u);
  for (std::size_t t = 1; t <= 50; ++t) {
    run_iteration(agents, ring(1), c, t);
    central_step(s, d.ratings.mask(), d.ratings.values(), c.ridge);
    const double scale_u = 1.0 + frob_norm(s.u), scale_v = 1.0 + frob_norm(s.v);
    ASSERT_LE(frob_distance(agents[0].u, s.u), 1e-10 * scale_u) << "iteration " << t;
    ASSERT_LE(frob_distance(agents[0].v, s.v), 1e-10 * scale_v) << "iteration " << t;
  }
}

}  // namespace
}  // namespace dmc
