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

#include "dmc/engine.h"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dmc/errors.h"
#include "dmc/random.h"

namespace dmc {
namespace {

std::string AgentLabel(const AgentState& agent) {
  return "agent " + std::to_string(agent.id);
}

void RequireFinite(const Dense& m, const AgentState& agent, const char* step) {
  if (!m.AllFinite()) {
    throw NumericalError(AgentLabel(agent) + ": " + step +
                         " produced non-finite values");
  }
}

}  // namespace

std::string_view to_string(UpdateMode mode) {
  switch (mode) {
    case UpdateMode::kVerbatim: return "verbatim";
    case UpdateMode::kConsensus: return "consensus";
    case UpdateMode::kExact: return "exact";
  }
  return "unknown";
}

std::string_view to_string(ExchangeSchedule schedule) {
  return schedule == ExchangeSchedule::kSingle ? "single" : "double";
}

UpdateMode parse_update_mode(std::string_view text) {
  if (text == "verbatim") return UpdateMode::kVerbatim;
  if (text == "consensus") return UpdateMode::kConsensus;
  if (text == "exact") return UpdateMode::kExact;
  throw ConfigError("unknown update mode '" + std::string(text) +
                    "' (expected verbatim, consensus or exact)");
}

ExchangeSchedule parse_exchange_schedule(std::string_view text) {
  if (text == "single") return ExchangeSchedule::kSingle;
  if (text == "double") return ExchangeSchedule::kDouble;
  throw ConfigError("unknown exchange schedule '" + std::string(text) +
                    "' (expected single or double)");
}

void EngineConfig::validate() const {
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be > 0");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("ridge must be >= 0");
  if (init_scale && (!(*init_scale > 0.0) || !std::isfinite(*init_scale))) {
    throw ConfigError("init_scale must be > 0");
  }
  if (stop_tolerance && !(*stop_tolerance >= 0.0)) {
    throw ConfigError("stop_tolerance must be >= 0");
  }
}

double EngineConfig::effective_init_scale() const {
  return init_scale.value_or(1.0 / std::sqrt(static_cast<double>(rank)));
}

Dense random_factor(std::size_t rows, std::size_t cols, double scale,
                    std::uint64_t seed, std::size_t agent) {
  std::mt19937_64 rng =
      MakeRng(seed, Stream::kAgentInit, static_cast<std::uint32_t>(agent));
  std::normal_distribution<double> normal(0.0, scale);
  Dense out(rows, cols);
  for (double& v : out.values()) v = normal(rng);
  return out;
}

std::vector<AgentState> init_agents(const std::vector<Shard>& shards,
                                    const Topology& topology,
                                    const EngineConfig& config) {
  config.validate();
  if (topology.agents() != shards.size()) {
    throw ConfigError("topology has " + std::to_string(topology.agents()) +
                      " agents but there are " + std::to_string(shards.size()) +
                      " shards");
  }
  std::vector<AgentState> agents;
  agents.reserve(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const Shard& shard = shards[i];
    const std::size_t m = shard.local.users();
    if (config.rank > m) {
      throw ConfigError("rank " + std::to_string(config.rank) +
                        " exceeds the user count " + std::to_string(m));
    }
    AgentState a;
    a.id = i;
    a.shard = shard;
    a.omega = shard.local.mask();
    a.observed = shard.local.values();
    a.u = random_factor(m, config.rank, config.effective_init_scale(), config.seed, i);
    a.v = Dense(config.rank, shard.width());
    a.z = masked_assign(Dense(m, shard.width()), a.omega, a.observed);
    a.dual = Dense(m, config.rank);
    agents.push_back(std::move(a));
  }
  return agents;
}

double retry_ridge(const Dense& s, double relative_ridge) {
  const double t = trace(s);
  if (s.rows() == 0 || !(t > 0.0)) return relative_ridge;
  return relative_ridge * t / static_cast<double>(s.rows());
}

Dense solve_spd_with_retry(const Dense& s, const Dense& b, double relative_ridge,
                           const std::string& what) {
  try {
    return solve_spd(s, b, 0.0);
  } catch (const SingularityError&) {
  }
  try {
    return solve_spd(s, b, retry_ridge(s, relative_ridge));
  } catch (const SingularityError& e) {
    throw SingularityError(what + ": system singular even with ridge (" +
                           e.what() + ")");
  }
}

void step_v(AgentState& agent, double relative_ridge) {
  // U^T U V = U^T Z.
  agent.v = solve_spd_with_retry(gram(agent.u), matmul_tn(agent.u, agent.z),
                                 relative_ridge, AgentLabel(agent) + " V-step");
  RequireFinite(agent.v, agent, "V-step");
}

void step_z(AgentState& agent) {
  agent.z = masked_assign(matmul(agent.u, agent.v), agent.omega, agent.observed);
}

SnapshotTable exchange(const std::vector<AgentState>& agents,
                       const Topology& topology, std::size_t iteration,
                       const ExchangeObserver& observer) {
  SnapshotTable table(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j : topology.neighbors(i)) {
      table[i].push_back({j, iteration, agents[j].u});
      if (observer) observer(j, i, iteration, table[i].back().u);
    }
  }
  return table;
}

Dense neighbor_sum(std::span<const Snapshot> snapshots, std::size_t rows,
                   std::size_t cols) {
  Dense sum(rows, cols);
  for (const Snapshot& s : snapshots) add_scaled(sum, 1.0, s.u);
  return sum;
}

void step_u(AgentState& agent, std::span<const Snapshot> snapshots,
            const EngineConfig& config) {
  const double beta = config.beta;
  const auto degree = static_cast<double>(snapshots.size());
  const Dense s = neighbor_sum(snapshots, agent.u.rows(), agent.u.cols());

  Dense rhs = matmul_nt(agent.z, agent.v);
  add_scaled(rhs, -1.0, agent.dual);
  if (config.mode != UpdateMode::kVerbatim) add_scaled(rhs, beta * degree, agent.u);
  add_scaled(rhs, beta, s);

  if (config.mode == UpdateMode::kExact) {
    // U M = rhs with symmetric M, solved as M U^T = rhs^T.
    Dense system = matmul_nt(agent.v, agent.v);
    for (std::size_t k = 0; k < system.rows(); ++k) system(k, k) += 2.0 * beta * degree;
    agent.u = transpose(solve_spd_with_retry(system, transpose(rhs), config.ridge,
                                             AgentLabel(agent) + " U-step"));
  } else {
    scale(rhs, 1.0 / (1.0 + 2.0 * beta * degree));
    agent.u = std::move(rhs);
  }
  RequireFinite(agent.u, agent, "U-step");
}

void step_dual(AgentState& agent, std::span<const Snapshot> snapshots,
               double beta) {
  if (snapshots.empty()) return;
  Dense residual = agent.u;
  scale(residual, static_cast<double>(snapshots.size()));
  add_scaled(residual, -1.0,
             neighbor_sum(snapshots, agent.u.rows(), agent.u.cols()));
  add_scaled(agent.dual, beta, residual);
  RequireFinite(agent.dual, agent, "dual step");
}

FactorModel model_from_agents(const std::vector<AgentState>& agents,
                              bool mean_user_factors) {
  if (agents.empty()) return FactorModel();
  std::vector<FactorBlock> blocks;
  blocks.reserve(agents.size());
  for (const AgentState& a : agents) {
    blocks.push_back({a.shard.col_start, a.shard.col_end, a.u, a.v});
  }
  FactorModel model(agents.front().u.rows(), agents.back().shard.col_end,
                    std::move(blocks));
  const RatingMatrix& local = agents.front().shard.local;
  model.user_ids = local.user_ids();
  for (const AgentState& a : agents) {
    const auto& ids = a.shard.local.item_ids();
    if (ids.empty()) {
      model.item_ids.clear();
      break;
    }
    model.item_ids.insert(model.item_ids.end(), ids.begin(), ids.end());
  }
  return mean_user_factors ? model.with_mean_user_factors() : model;
}

IterationMetrics metrics(const std::vector<AgentState>& agents,
                         const Topology& topology, const RatingMatrix* test) {
  IterationMetrics out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  double objective = 0.0;
  double train_sq = 0.0;
  std::size_t train_count = 0;
  for (const AgentState& a : agents) {
    const Dense product = matmul(a.u, a.v);
    const double d = frob_distance(product, a.z);
    objective += 0.5 * d * d;
    for (const Rating& e : a.shard.local.entries()) {
      const double err = product(e.user, e.item) - e.value;
      train_sq += err * err;
    }
    train_count += a.shard.local.size();
  }
  out.objective = objective;
  out.train_rmse =
      train_count == 0 ? nan : std::sqrt(train_sq / static_cast<double>(train_count));
  out.test_rmse = (test == nullptr || test->empty())
                      ? nan
                      : rmse(model_from_agents(agents), *test);

  double gap = 0.0;
  for (const auto& [i, j] : topology.edges()) {
    gap = std::max(gap, frob_distance(agents[i].u, agents[j].u));
  }
  out.consensus_gap = gap;

  if (!agents.empty()) {
    Dense dual_sum(agents.front().dual.rows(), agents.front().dual.cols());
    for (const AgentState& a : agents) add_scaled(dual_sum, 1.0, a.dual);
    out.dual_sum_norm = frob_norm(dual_sum);
  }
  return out;
}

void for_each_agent(std::size_t count, std::size_t workers,
                    const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
#ifdef _OPENMP
  const int threads = workers == 0 ? omp_get_max_threads()
                                   : static_cast<int>(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double run_iteration(std::vector<AgentState>& agents, const Topology& topology,
                     const EngineConfig& config, std::size_t iteration,
                     const ExchangeObserver& observer) {
  const std::size_t n = agents.size();
  const std::size_t w = config.workers;
  std::vector<Dense> previous(n);
  for (std::size_t i = 0; i < n; ++i) previous[i] = agents[i].u;

  for_each_agent(n, w, [&](std::size_t i) { step_v(agents[i], config.ridge); });
  for_each_agent(n, w, [&](std::size_t i) { step_z(agents[i]); });
  const SnapshotTable before = exchange(agents, topology, iteration, observer);
  for_each_agent(n, w, [&](std::size_t i) { step_u(agents[i], before[i], config); });
  if (config.schedule == ExchangeSchedule::kDouble) {
    const SnapshotTable after = exchange(agents, topology, iteration, observer);
    for_each_agent(n, w, [&](std::size_t i) {
      step_dual(agents[i], after[i], config.beta);
    });
  } else {
    for_each_agent(n, w, [&](std::size_t i) {
      step_dual(agents[i], before[i], config.beta);
    });
  }

  double change = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    change = std::max(change, frob_distance(agents[i].u, previous[i]) /
                                  (1.0 + frob_norm(previous[i])));
  }
  return change;
}

RunResult run(std::vector<AgentState>& agents, const Topology& topology,
              const EngineConfig& config, const RunOptions& options) {
  config.validate();
  if (topology.agents() != agents.size()) {
    throw ConfigError("topology and agent counts differ");
  }
  using Clock = std::chrono::steady_clock;
  RunResult result;
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const auto start = Clock::now();
    double change = 0.0;
    try {
      change = run_iteration(agents, topology, config, t, options.observer);
    } catch (const SingularityError& e) {
      throw SingularityError("iteration " + std::to_string(t) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    }
    IterationMetrics m = metrics(agents, topology, options.test);
    m.iteration = t;
    if (options.timing) {
      m.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    result.series.push_back(m);
    if (options.sink) options.sink(m);
    result.iterations_run = t;
    if (config.stop_tolerance && change < *config.stop_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace dmc
