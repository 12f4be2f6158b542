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

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dmc/centralized.h"
#include "dmc/errors.h"
#include "dmc/eval.h"
#include "dmc/experiment.h"
#include "dmc/io.h"

namespace dmc {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json MetricsJson(const IterationMetrics& m) {
  return {{"iteration", m.iteration},          {"objective", m.objective},
          {"train_rmse", m.train_rmse},        {"test_rmse", m.test_rmse},
          {"consensus_gap", m.consensus_gap},  {"dual_sum_norm", m.dual_sum_norm}};
}

json RankingJson(const FactorModel& model, const RatingMatrix& test,
                 double threshold) {
  json out = {{"like_threshold", threshold}};
  try {
    const RankingResult r = maps(model, test, threshold);
    out["maps"] = r.maps;
    out["counted_users"] = r.counted_users;
    out["skipped_users"] = r.skipped_users;
  } catch (const DataError& e) {
    out["maps"] = nullptr;
    out["note"] = e.what();
  }
  return out;
}

json DataJson(const PreparedData& data) {
  return {{"users", data.ratings.users()},
          {"items", data.ratings.items()},
          {"observed", data.ratings.size()},
          {"train_entries", data.split.train.size()},
          {"test_entries", data.split.test.size()},
          {"edges", data.topology.edges().size()}};
}

json ConfigJson(const ExperimentConfig& config) {
  json out = json::object();
  for (const auto& [k, v] : config.to_key_values()) out[k] = v;
  return out;
}

void WriteOutputs(const ExperimentConfig& config,
                  const std::vector<IterationMetrics>& series,
                  const FactorModel& model, const json& summary) {
  std::filesystem::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "metrics.csv", metrics_csv(series));
  if (config.dump_factors) save_factor_model(model, config.output_dir / "factors");
  write_file_atomic(config.output_dir / "summary.json", summary.dump(2) + "\n");
}

template <typename Body>
int Guard(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

std::uint32_t LookupId(const std::string& id, const std::vector<std::string>& names,
                       const std::unordered_map<std::string, std::uint32_t>& table,
                       std::size_t extent, const char* what, std::size_t line,
                       const std::string& source) {
  if (names.empty()) {
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
    if (ec == std::errc() && ptr == id.data() + id.size() && v < extent) return v;
  } else if (const auto it = table.find(id); it != table.end()) {
    return it->second;
  }
  throw DataError(source + ":" + std::to_string(line) + ": " + what + " '" + id +
                  "' is not in the factor dump");
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const auto start = Clock::now();
    const PreparedData data = prepare_data(config);
    const std::vector<Shard> shards =
        partition_columns(data.split.train, config.agents);
    std::vector<AgentState> agents = init_agents(shards, data.topology, config.engine);

    RunOptions options;
    options.test = &data.split.test;
    options.timing = config.timing;
    const RunResult result = run(agents, data.topology, config.engine, options);
    const FactorModel model = model_from_agents(agents);

    json summary;
    summary["command"] = "run";
    summary["iterations_run"] = result.iterations_run;
    summary["converged"] = result.converged;
    summary["final"] = MetricsJson(result.series.back());
    summary["ranking"] = RankingJson(model, data.split.test, config.like_threshold);
    if (config.mean_user_factors) {
      const FactorModel mean_model = model.with_mean_user_factors();
      json mean = {{"train_rmse", rmse(mean_model, data.split.train)}};
      mean["test_rmse"] = data.split.test.empty()
                              ? std::nan("")
                              : rmse(mean_model, data.split.test);
      mean["ranking"] =
          RankingJson(mean_model, data.split.test, config.like_threshold);
      summary["mean_user_factors"] = mean;
    }
    summary["modes"] = {{"update_mode", to_string(config.engine.mode)},
                        {"exchange_schedule", to_string(config.engine.schedule)},
                        {"agents", config.agents},
                        {"topology", config.to_key_values().at("topology")}};
    summary["data"] = DataJson(data);
    summary["config"] = ConfigJson(config);
    summary["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    WriteOutputs(config, result.series, model, summary);
    const IterationMetrics& last = result.series.back();
    out << "run: " << result.iterations_run << " iterations, train_rmse "
        << format_double(last.train_rmse) << ", test_rmse "
        << format_double(last.test_rmse) << ", consensus_gap "
        << format_double(last.consensus_gap) << " -> "
        << config.output_dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_baseline(const ExperimentConfig& config, std::ostream& out,
                 std::ostream& err) {
  return Guard(err, [&] {
    const auto start = Clock::now();
    const PreparedData data = prepare_data(config);
    RunOptions options;
    options.test = &data.split.test;
    options.timing = config.timing;
    const CentralRunResult result =
        central_run(data.split.train, config.engine, options);
    const FactorModel model = model_from_central(result.state, data.split.train);

    json summary;
    summary["command"] = "baseline";
    summary["iterations_run"] = result.iterations_run;
    summary["converged"] = result.converged;
    if (!result.series.empty()) summary["final"] = MetricsJson(result.series.back());
    summary["ranking"] = RankingJson(model, data.split.test, config.like_threshold);
    summary["modes"] = {{"update_mode", "centralized"}, {"agents", 1}};
    summary["data"] = DataJson(data);
    summary["config"] = ConfigJson(config);
    summary["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    WriteOutputs(config, result.series, model, summary);
    out << "baseline: " << result.iterations_run << " sweeps";
    if (!result.series.empty()) {
      out << ", train_rmse " << format_double(result.series.back().train_rmse)
          << ", test_rmse " << format_double(result.series.back().test_rmse);
    }
    out << " -> " << config.output_dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const SyntheticData data = synth_low_rank(options.spec);
    std::filesystem::path truth_path = options.truth_output;
    if (truth_path.empty()) {
      truth_path = options.output;
      truth_path.replace_filename(options.output.stem().string() + ".truth.csv");
    }
    if (options.output.has_parent_path()) {
      std::filesystem::create_directories(options.output.parent_path());
    }
    if (truth_path.has_parent_path()) {
      std::filesystem::create_directories(truth_path.parent_path());
    }
    save_ratings(data.ratings, options.output);

    std::vector<Rating> cells;
    cells.reserve(data.truth.size());
    for (std::size_t u = 0; u < data.truth.rows(); ++u)
      for (std::size_t i = 0; i < data.truth.cols(); ++i)
        cells.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i),
                         data.truth(u, i)});
    save_ratings(RatingMatrix(data.truth.rows(), data.truth.cols(), std::move(cells)),
                 truth_path);
    out << "synth: " << data.ratings.size() << " ratings -> "
        << options.output.string() << ", ground truth -> " << truth_path.string()
        << "\n";
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const FactorModel model = load_factor_model(options.factors_dir);
    std::ifstream in(options.test_path);
    if (!in) throw DataError("cannot open test file " + options.test_path.string());
    const std::string source = options.test_path.string();
    const std::vector<RawRating> raw = read_raw_ratings(in, source);
    if (raw.empty()) throw DataError(source + ": no ratings");

    std::unordered_map<std::string, std::uint32_t> users, items;
    for (std::size_t k = 0; k < model.user_ids.size(); ++k)
      users.emplace(model.user_ids[k], static_cast<std::uint32_t>(k));
    for (std::size_t k = 0; k < model.item_ids.size(); ++k)
      items.emplace(model.item_ids[k], static_cast<std::uint32_t>(k));
    std::vector<Rating> entries;
    entries.reserve(raw.size());
    for (const RawRating& r : raw) {
      entries.push_back(
          {LookupId(r.user, model.user_ids, users, model.users(), "user", r.line, source),
           LookupId(r.item, model.item_ids, items, model.items(), "item", r.line, source),
           r.value});
    }
    const RatingMatrix test(model.users(), model.items(), std::move(entries));
    const double error = rmse(model, test);
    const RankingResult ranking = maps(model, test, options.like_threshold);

    json summary;
    summary["command"] = "eval";
    summary["factors"] = options.factors_dir.string();
    summary["test"] = source;
    summary["test_entries"] = test.size();
    summary["rmse"] = error;
    summary["ranking"] = {{"like_threshold", options.like_threshold},
                          {"maps", ranking.maps},
                          {"counted_users", ranking.counted_users},
                          {"skipped_users", ranking.skipped_users}};
    std::filesystem::create_directories(options.output_dir);
    write_file_atomic(options.output_dir / "summary.json", summary.dump(2) + "\n");
    out << "eval: mAPS " << format_double(ranking.maps) << " over "
        << ranking.counted_users << " users (" << ranking.skipped_users
        << " without liked items), rmse " << format_double(error) << "\n";
    return kExitOk;
  });
}

}  // namespace dmc
