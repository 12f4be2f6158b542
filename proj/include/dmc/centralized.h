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

#ifndef DMC_CENTRALIZED_H_
#define DMC_CENTRALIZED_H_

// Centralized reference solver for
//
//   min_{U,V,Z} 1/2 ||U V - Z||_F^2  subject to  Z = R on the observed set,
//
// by block coordinate descent: V, then Z, then U, each block solved exactly.
// It is the single-agent special case of the decentralized engine, which
// makes lock-step comparisons possible.

#include <optional>

#include "dmc/data.h"
#include "dmc/engine.h"
#include "dmc/eval.h"
#include "dmc/matrix.h"

namespace dmc {

struct CentralState {
  Dense u;  // users x rank
  Dense v;  // rank x items
  Dense z;  // users x items
};

// U given (or random from the agent-0 stream of config.seed), V = 0,
// Z = R on the observed set and 0 elsewhere.
CentralState init_central(const RatingMatrix& train, const EngineConfig& config,
                          std::optional<Dense> initial_u = std::nullopt);

// One V -> Z -> U sweep.
void central_step(CentralState& state, const MaskedIndexSet& omega,
                  std::span<const double> observed, double relative_ridge);

double central_objective(const CentralState& state);

FactorModel model_from_central(const CentralState& state,
                               const RatingMatrix& train);

struct CentralRunResult {
  CentralState state;
  std::vector<IterationMetrics> series;
  std::size_t iterations_run = 0;
  bool converged = false;
};

// Runs up to config.iterations sweeps (0 returns the initial state). With a
// stop tolerance, stops when the relative objective change
// |f_t - f_{t-1}| / (1 + f_{t-1}) drops below it. Metrics rows have the
// same shape as the engine's, with zero consensus gap and dual norm.
CentralRunResult central_run(const RatingMatrix& train, const EngineConfig& config,
                             const RunOptions& options = {},
                             std::optional<Dense> initial_u = std::nullopt);

}  // namespace dmc

#endif  // DMC_CENTRALIZED_H_
