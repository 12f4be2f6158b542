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

#ifndef DMC_EXPERIMENT_H_
#define DMC_EXPERIMENT_H_

// Experiment configuration and the end-to-end pipelines behind the `dmc`
// command line tool.
//
// A configuration is a flat set of keys. Files may group keys under INI
// sections ([data], [network], [engine], [eval], [output]) but section names
// are not part of the key, so every key is unique and can be overridden on
// the command line as --key=value. A JSON object of key -> value (or a
// summary.json with a "config" member) is accepted as well, which is how a
// run's config echo is fed back.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmc/data.h"
#include "dmc/engine.h"
#include "dmc/topology.h"

namespace dmc {

using KeyValues = std::map<std::string, std::string>;

enum class DataSource { kSynthetic, kFile };
enum class TopologyKind { kRing, kComplete, kErdosRenyi, kFile };

struct ExperimentConfig {
  std::uint64_t seed = 1;

  DataSource source = DataSource::kSynthetic;
  std::filesystem::path data_path;
  SyntheticSpec synthetic;  // seed is overwritten by `seed`
  double split_fraction = 0.75;
  bool stratified_split = false;

  std::size_t agents = 8;
  TopologyKind topology = TopologyKind::kRing;
  double edge_probability = 0.4;
  std::filesystem::path topology_path;

  // rank defaults to the generating rank for synthetic data and to 64 for
  // file data.
  EngineConfig engine;

  double like_threshold = 1.0;
  bool mean_user_factors = false;

  std::filesystem::path output_dir = "out";
  bool dump_factors = false;
  bool timing = false;

  // Canonical key -> value echo; parsing it back gives an identical config.
  KeyValues to_key_values() const;
};

// Every recognized key with its default value.
const KeyValues& default_key_values();

// Reads an INI or JSON config file into key/values. Throws ConfigError on
// unknown keys, keys repeated across sections, or unreadable files.
KeyValues read_config_file(const std::filesystem::path& path);
KeyValues parse_config_text(const std::string& text, const std::string& source);

// Layers `overrides` over the defaults and `file` values, applies the
// DMC_SEED environment variable (unless `seed` is overridden explicitly),
// then parses and validates every value. Throws ConfigError.
ExperimentConfig resolve_config(const KeyValues& file, const KeyValues& overrides,
                                const char* env_seed);

// Parses and validates a complete key set.
ExperimentConfig parse_config(const KeyValues& values);

// Data, split and topology for an experiment, validated against each other.
struct PreparedData {
  RatingMatrix ratings;
  std::optional<Dense> truth;
  SplitDataset split;
  Topology topology;
};

PreparedData prepare_data(const ExperimentConfig& config);

// metrics.csv contents for a series, header included.
std::string metrics_csv(const std::vector<IterationMetrics>& series);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

// `run`: decentralized engine. Writes metrics.csv, summary.json and, if
// requested, factors/ under config.output_dir.
int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
// `baseline`: centralized oracle on the same pipeline and output formats.
int cmd_baseline(const ExperimentConfig& config, std::ostream& out,
                 std::ostream& err);

struct SynthOptions {
  SyntheticSpec spec;
  std::filesystem::path output = "ratings.csv";
  // Defaults to <output stem>.truth.csv next to the output.
  std::filesystem::path truth_output;
};
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

struct EvalOptions {
  std::filesystem::path factors_dir;
  std::filesystem::path test_path;
  double like_threshold = 1.0;
  std::filesystem::path output_dir = ".";
};
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

}  // namespace dmc

#endif  // DMC_EXPERIMENT_H_
