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

#ifndef DMC_ENGINE_H_
#define DMC_ENGINE_H_

// Decentralized matrix completion. Agent i owns a column shard R_i of the
// rating matrix and keeps a full-size replica U_i of the user factors, its
// own item factors V_i, the completed block Z_i and a dual variable a_i. One
// iteration runs, with a barrier between phases:
//
//   V_i = (U_i^T U_i)^{-1} U_i^T Z_i
//   Z_i = U_i V_i, with the observed entries of R_i written back
//   send U_i to every neighbor j in N_i
//   U_i = update(Z_i V_i^T, a_i, neighbor replicas)       (see UpdateMode)
//   [send U_i again]                                      (kDouble schedule)
//   a_i += beta * (|N_i| U_i - sum_{j in N_i} U_j)
//
// Only U replicas ever leave an agent.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmc/data.h"
#include "dmc/eval.h"
#include "dmc/matrix.h"
#include "dmc/topology.h"

namespace dmc {

enum class UpdateMode {
  // (Z V^T - a + beta * S) / (1 + 2 beta |N|), S = sum of neighbor replicas.
  kVerbatim,
  // As kVerbatim plus a beta |N| U_old self term in the numerator, which makes
  // exact consensus a fixed point.
  kConsensus,
  // Exact minimizer of the quadratic U subproblem:
  //   U (V V^T + 2 beta |N| I) = Z V^T - a + beta |N| U_old + beta S.
  kExact,
};

enum class ExchangeSchedule {
  // One exchange per iteration; the dual step reuses the pre-update replicas.
  kSingle,
  // A second exchange after the U step so the dual step sees replicas from
  // the same time index as the local U.
  kDouble,
};

std::string_view to_string(UpdateMode mode);
std::string_view to_string(ExchangeSchedule schedule);
UpdateMode parse_update_mode(std::string_view text);
ExchangeSchedule parse_exchange_schedule(std::string_view text);

struct EngineConfig {
  std::size_t rank = 8;
  double beta = 0.5;
  std::size_t iterations = 500;
  UpdateMode mode = UpdateMode::kExact;
  ExchangeSchedule schedule = ExchangeSchedule::kDouble;
  // Relative ridge used on retry after a failed Cholesky factorization:
  // the shift is ridge * trace(S) / dim(S), or ridge itself if the trace is 0.
  double ridge = 1e-8;
  // Standard deviation of the initial U entries; 1/sqrt(rank) when unset.
  std::optional<double> init_scale;
  std::uint64_t seed = 1;
  // Stop once max_i ||U_i^t - U_i^{t-1}||_F / (1 + ||U_i^{t-1}||_F) falls
  // below this.
  std::optional<double> stop_tolerance;
  // Concurrent agent updates per phase; 0 uses every available thread.
  std::size_t workers = 1;

  // Throws ConfigError.
  void validate() const;
  double effective_init_scale() const;
};

struct AgentState {
  std::size_t id = 0;
  Shard shard;
  // Observed positions of the local block and their ratings, in mask order.
  MaskedIndexSet omega;
  std::vector<double> observed;

  Dense u;     // users x rank
  Dense v;     // rank x width
  Dense z;     // users x width
  Dense dual;  // users x rank
};

// i.i.d. normal(0, scale^2) entries drawn from agent `agent`'s stream of
// `seed`.
Dense random_factor(std::size_t rows, std::size_t cols, double scale,
                    std::uint64_t seed, std::size_t agent);

// U_i random (independent stream per agent), V_i = 0, Z_i = R_i on the
// observed positions and 0 elsewhere, a_i = 0.
std::vector<AgentState> init_agents(const std::vector<Shard>& shards,
                                    const Topology& topology,
                                    const EngineConfig& config);

// The ridge shift applied on retry for the system matrix `s`.
double retry_ridge(const Dense& s, double relative_ridge);

// Solves (S + eps I) X = B with eps = 0, retrying once with
// retry_ridge(S, relative_ridge). `what` prefixes the error message.
Dense solve_spd_with_retry(const Dense& s, const Dense& b, double relative_ridge,
                           const std::string& what);

void step_v(AgentState& agent, double relative_ridge);
void step_z(AgentState& agent);

// A neighbor's U replica as received.
struct Snapshot {
  std::size_t sender = 0;
  std::size_t iteration = 0;
  Dense u;
};

// table[i] holds the snapshots delivered to agent i, ascending by sender.
using SnapshotTable = std::vector<std::vector<Snapshot>>;

// Called once per delivered message; lets tests audit what crosses agent
// boundaries.
using ExchangeObserver = std::function<void(
    std::size_t sender, std::size_t receiver, std::size_t iteration,
    const Dense& payload)>;

// Copies every agent's current U to each of its neighbors.
SnapshotTable exchange(const std::vector<AgentState>& agents,
                       const Topology& topology, std::size_t iteration,
                       const ExchangeObserver& observer = {});

// Sum of the snapshot replicas in ascending sender order.
Dense neighbor_sum(std::span<const Snapshot> snapshots, std::size_t rows,
                   std::size_t cols);

void step_u(AgentState& agent, std::span<const Snapshot> snapshots,
            const EngineConfig& config);
void step_dual(AgentState& agent, std::span<const Snapshot> snapshots,
               double beta);

struct IterationMetrics {
  std::size_t iteration = 0;
  double objective = 0.0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double consensus_gap = 0.0;
  double dual_sum_norm = 0.0;
  double wall_ms = 0.0;
};

using MetricSink = std::function<void(const IterationMetrics&)>;

// Predictor where each agent scores its own columns with its own U_i. With
// mean_user_factors, every block uses the average replica instead.
FactorModel model_from_agents(const std::vector<AgentState>& agents,
                              bool mean_user_factors = false);

// Objective sum_i 1/2 ||U_i V_i - Z_i||_F^2, train RMSE over every agent's
// observed entries, test RMSE over `test` (NaN if null or empty), the
// largest ||U_i - U_j||_F over edges (0 without edges) and ||sum_i a_i||_F.
IterationMetrics metrics(const std::vector<AgentState>& agents,
                         const Topology& topology, const RatingMatrix* test);

// Runs fn(0) ... fn(count - 1) on up to `workers` threads (0 = all). The
// first failure in index order is rethrown after every call has finished.
void for_each_agent(std::size_t count, std::size_t workers,
                    const std::function<void(std::size_t)>& fn);

// One full iteration over all agents; returns the largest relative U change.
double run_iteration(std::vector<AgentState>& agents, const Topology& topology,
                     const EngineConfig& config, std::size_t iteration,
                     const ExchangeObserver& observer = {});

struct RunOptions {
  const RatingMatrix* test = nullptr;
  MetricSink sink;
  ExchangeObserver observer;
  // Fill IterationMetrics::wall_ms; off keeps metric series reproducible.
  bool timing = false;
};

struct RunResult {
  std::vector<IterationMetrics> series;
  std::size_t iterations_run = 0;
  bool converged = false;
};

// Iterates until config.iterations or the stop tolerance. Numerical errors
// are rethrown as NumericalError with the iteration in the message.
RunResult run(std::vector<AgentState>& agents, const Topology& topology,
              const EngineConfig& config, const RunOptions& options = {});

}  // namespace dmc

#endif  // DMC_ENGINE_H_
