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

#include <chrono>
#include <cmath>
#include <limits>

#include "dmc/errors.h"

namespace dmc {

CentralState init_central(const RatingMatrix& train, const EngineConfig& config,
                          std::optional<Dense> initial_u) {
  const std::size_t m = train.users(), n = train.items();
  if (config.rank < 1 || config.rank > m) {
    throw ConfigError("rank " + std::to_string(config.rank) +
                      " must be in [1, users=" + std::to_string(m) + "]");
  }
  CentralState state;
  if (initial_u) {
    if (initial_u->rows() != m || initial_u->cols() != config.rank) {
      throw ConfigError("initial U has the wrong shape");
    }
    state.u = std::move(*initial_u);
  } else {
    state.u = random_factor(m, config.rank, config.effective_init_scale(),
                            config.seed, 0);
  }
  state.v = Dense(config.rank, n);
  state.z = masked_assign(Dense(m, n), train.mask(), train.values());
  return state;
}

void central_step(CentralState& state, const MaskedIndexSet& omega,
                  std::span<const double> observed, double relative_ridge) {
  state.v = solve_spd_with_retry(gram(state.u), matmul_tn(state.u, state.z),
                                 relative_ridge, "central V-step");
  state.z = masked_assign(matmul(state.u, state.v), omega, observed);
  // U V V^T = Z V^T, solved as (V V^T) U^T = (Z V^T)^T.
  state.u = transpose(solve_spd_with_retry(matmul_nt(state.v, state.v),
                                           transpose(matmul_nt(state.z, state.v)),
                                           relative_ridge, "central U-step"));
  if (!state.u.AllFinite() || !state.v.AllFinite()) {
    throw NumericalError("central sweep produced non-finite values");
  }
}

double central_objective(const CentralState& state) {
  const double d = frob_distance(matmul(state.u, state.v), state.z);
  return 0.5 * d * d;
}

FactorModel model_from_central(const CentralState& state,
                               const RatingMatrix& train) {
  FactorModel model(state.u.rows(), state.v.cols(),
                    {FactorBlock{0, state.v.cols(), state.u, state.v}});
  model.user_ids = train.user_ids();
  model.item_ids = train.item_ids();
  return model;
}

CentralRunResult central_run(const RatingMatrix& train, const EngineConfig& config,
                             const RunOptions& options,
                             std::optional<Dense> initial_u) {
  using Clock = std::chrono::steady_clock;
  CentralRunResult result;
  result.state = init_central(train, config, std::move(initial_u));
  const MaskedIndexSet omega = train.mask();
  const std::vector<double> observed = train.values();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  double previous = central_objective(result.state);
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const auto start = Clock::now();
    try {
      central_step(result.state, omega, observed, config.ridge);
    } catch (const SingularityError& e) {
      throw SingularityError("iteration " + std::to_string(t) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    }

    IterationMetrics m;
    m.iteration = t;
    m.objective = central_objective(result.state);
    const FactorModel model = model_from_central(result.state, train);
    m.train_rmse = train.empty() ? nan : rmse(model, train);
    m.test_rmse = (options.test == nullptr || options.test->empty())
                      ? nan
                      : rmse(model, *options.test);
    if (options.timing) {
      m.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    result.series.push_back(m);
    if (options.sink) options.sink(m);
    result.iterations_run = t;

    if (config.stop_tolerance &&
        std::abs(m.objective - previous) / (1.0 + previous) < *config.stop_tolerance) {
      result.converged = true;
      break;
    }
    previous = m.objective;
  }
  return result;
}

}  // namespace dmc
