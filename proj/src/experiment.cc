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

#include "dmc/experiment.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "dmc/errors.h"

namespace dmc {
namespace {

constexpr const char* kAuto = "auto";
constexpr const char* kNone = "none";

std::string Require(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::uint64_t ParseUnsigned(const KeyValues& kv, const std::string& key) {
  const std::string s = Require(kv, key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" +
                      s + "'");
  }
  return v;
}

double ParseReal(const KeyValues& kv, const std::string& key) {
  const std::string s = Require(kv, key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
  }
  return v;
}

bool ParseBool(const KeyValues& kv, const std::string& key) {
  const std::string s = Require(kv, key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + s + "'");
}

std::string BoolText(bool b) { return b ? "true" : "false"; }

std::string_view ToString(DataSource s) {
  return s == DataSource::kSynthetic ? "synthetic" : "file";
}

std::string_view ToString(TopologyKind k) {
  switch (k) {
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kErdosRenyi: return "erdos_renyi";
    case TopologyKind::kFile: return "file";
  }
  return "ring";
}

void CheckKnown(const std::string& key, const std::string& source) {
  if (default_key_values().count(key) == 0) {
    throw ConfigError(source + ": unknown config key '" + key + "'");
  }
}

void Insert(KeyValues& kv, const std::string& key, std::string value,
            const std::string& source) {
  CheckKnown(key, source);
  if (!kv.emplace(key, std::move(value)).second) {
    throw ConfigError(source + ": config key '" + key + "' given twice");
  }
}

std::string JsonScalar(const nlohmann::json& v, const std::string& key,
                       const std::string& source) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return BoolText(v.get<bool>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ConfigError(source + ": config key '" + key + "' must be a scalar");
}

KeyValues ParseJsonConfig(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc["config"].is_object()) {
    doc = doc["config"];
  }
  if (!doc.is_object()) throw ConfigError(source + ": expected a JSON object");
  KeyValues kv;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [inner, v] : value.items()) {
        Insert(kv, inner, JsonScalar(v, inner, source), source);
      }
    } else {
      Insert(kv, key, JsonScalar(value, key, source), source);
    }
  }
  return kv;
}

KeyValues ParseIniConfig(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  KeyValues kv;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      Insert(kv, key, node.data(), source);
    } else {
      for (const auto& [inner, leaf] : node) {
        Insert(kv, inner, leaf.data(), source);
      }
    }
  }
  return kv;
}

}  // namespace

const KeyValues& default_key_values() {
  static const KeyValues defaults = {
      {"seed", "1"},
      // [data]
      {"source", "synthetic"},
      {"path", ""},
      {"users", "200"},
      {"items", "240"},
      {"true_rank", "8"},
      {"observe_fraction", "0.4"},
      {"noise_sd", "0"},
      {"split_fraction", "0.75"},
      {"stratified_split", "false"},
      // [network]
      {"agents", "8"},
      {"topology", "ring"},
      {"edge_probability", "0.4"},
      {"topology_file", ""},
      // [engine]
      {"rank", kAuto},
      {"beta", "0.5"},
      {"iterations", "500"},
      {"mode", "exact"},
      {"schedule", "double"},
      {"ridge", "1e-08"},
      {"init_scale", kAuto},
      {"stop_tolerance", kNone},
      {"workers", "0"},
      // [eval]
      {"like_threshold", "1"},
      {"mean_user_factors", "false"},
      // [output]
      {"output_dir", "out"},
      {"dump_factors", "false"},
      {"timing", "false"},
  };
  return defaults;
}

KeyValues parse_config_text(const std::string& text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return ParseJsonConfig(text, source);
  }
  return ParseIniConfig(text, source);
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

ExperimentConfig parse_config(const KeyValues& values) {
  for (const auto& [key, value] : values) CheckKnown(key, "config");
  KeyValues kv = default_key_values();
  for (const auto& [key, value] : values) kv[key] = value;

  ExperimentConfig c;
  c.seed = ParseUnsigned(kv, "seed");

  const std::string source = kv["source"];
  if (source == "synthetic") {
    c.source = DataSource::kSynthetic;
  } else if (source == "file") {
    c.source = DataSource::kFile;
  } else {
    throw ConfigError("source must be 'synthetic' or 'file', got '" + source + "'");
  }
  c.data_path = kv["path"];
  if (c.source == DataSource::kFile && c.data_path.empty()) {
    throw ConfigError("source = file needs a path");
  }
  c.synthetic.users = ParseUnsigned(kv, "users");
  c.synthetic.items = ParseUnsigned(kv, "items");
  c.synthetic.rank = ParseUnsigned(kv, "true_rank");
  c.synthetic.observe_fraction = ParseReal(kv, "observe_fraction");
  c.synthetic.noise_sd = ParseReal(kv, "noise_sd");
  c.synthetic.seed = c.seed;
  if (c.source == DataSource::kSynthetic) {
    if (c.synthetic.users == 0 || c.synthetic.items == 0) {
      throw ConfigError("users and items must be > 0");
    }
    if (c.synthetic.rank == 0 ||
        c.synthetic.rank > std::min(c.synthetic.users, c.synthetic.items)) {
      throw ConfigError("true_rank must be in [1, min(users, items)]");
    }
    if (!(c.synthetic.observe_fraction > 0.0 && c.synthetic.observe_fraction <= 1.0)) {
      throw ConfigError("observe_fraction must be in (0, 1]");
    }
    if (c.synthetic.noise_sd < 0.0) throw ConfigError("noise_sd must be >= 0");
  }
  c.split_fraction = ParseReal(kv, "split_fraction");
  if (!(c.split_fraction > 0.0 && c.split_fraction < 1.0)) {
    throw ConfigError("split_fraction must be in (0, 1)");
  }
  c.stratified_split = ParseBool(kv, "stratified_split");

  c.agents = ParseUnsigned(kv, "agents");
  if (c.agents < 1) throw ConfigError("agents must be >= 1");
  const std::string topo = kv["topology"];
  if (topo == "ring") {
    c.topology = TopologyKind::kRing;
  } else if (topo == "complete") {
    c.topology = TopologyKind::kComplete;
  } else if (topo == "erdos_renyi") {
    c.topology = TopologyKind::kErdosRenyi;
  } else if (topo == "file") {
    c.topology = TopologyKind::kFile;
  } else {
    throw ConfigError("topology must be ring, complete, erdos_renyi or file, got '" +
                      topo + "'");
  }
  c.edge_probability = ParseReal(kv, "edge_probability");
  if (!(c.edge_probability > 0.0 && c.edge_probability <= 1.0)) {
    throw ConfigError("edge_probability must be in (0, 1]");
  }
  c.topology_path = kv["topology_file"];
  if (c.topology == TopologyKind::kFile && c.topology_path.empty()) {
    throw ConfigError("topology = file needs topology_file");
  }

  EngineConfig& e = c.engine;
  if (kv["rank"] == kAuto) {
    e.rank = c.source == DataSource::kSynthetic ? c.synthetic.rank : 64;
  } else {
    e.rank = ParseUnsigned(kv, "rank");
  }
  e.beta = ParseReal(kv, "beta");
  e.iterations = ParseUnsigned(kv, "iterations");
  e.mode = parse_update_mode(kv["mode"]);
  e.schedule = parse_exchange_schedule(kv["schedule"]);
  e.ridge = ParseReal(kv, "ridge");
  if (kv["init_scale"] != kAuto) e.init_scale = ParseReal(kv, "init_scale");
  if (kv["stop_tolerance"] != kNone) e.stop_tolerance = ParseReal(kv, "stop_tolerance");
  e.workers = ParseUnsigned(kv, "workers");
  e.seed = c.seed;
  e.validate();
  if (c.source == DataSource::kSynthetic) {
    if (e.rank > c.synthetic.users) {
      throw ConfigError("rank " + std::to_string(e.rank) + " exceeds users " +
                        std::to_string(c.synthetic.users));
    }
    if (c.agents > c.synthetic.items) {
      throw ConfigError("agents " + std::to_string(c.agents) + " exceeds items " +
                        std::to_string(c.synthetic.items));
    }
  }

  c.like_threshold = ParseReal(kv, "like_threshold");
  c.mean_user_factors = ParseBool(kv, "mean_user_factors");
  c.output_dir = kv["output_dir"];
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  c.dump_factors = ParseBool(kv, "dump_factors");
  c.timing = ParseBool(kv, "timing");
  return c;
}

KeyValues ExperimentConfig::to_key_values() const {
  KeyValues kv;
  kv["seed"] = std::to_string(seed);
  kv["source"] = std::string(ToString(source));
  kv["path"] = data_path.string();
  kv["users"] = std::to_string(synthetic.users);
  kv["items"] = std::to_string(synthetic.items);
  kv["true_rank"] = std::to_string(synthetic.rank);
  kv["observe_fraction"] = format_double(synthetic.observe_fraction);
  kv["noise_sd"] = format_double(synthetic.noise_sd);
  kv["split_fraction"] = format_double(split_fraction);
  kv["stratified_split"] = BoolText(stratified_split);
  kv["agents"] = std::to_string(agents);
  kv["topology"] = std::string(ToString(topology));
  kv["edge_probability"] = format_double(edge_probability);
  kv["topology_file"] = topology_path.string();
  kv["rank"] = std::to_string(engine.rank);
  kv["beta"] = format_double(engine.beta);
  kv["iterations"] = std::to_string(engine.iterations);
  kv["mode"] = std::string(to_string(engine.mode));
  kv["schedule"] = std::string(to_string(engine.schedule));
  kv["ridge"] = format_double(engine.ridge);
  kv["init_scale"] = engine.init_scale ? format_double(*engine.init_scale) : kAuto;
  kv["stop_tolerance"] =
      engine.stop_tolerance ? format_double(*engine.stop_tolerance) : kNone;
  kv["workers"] = std::to_string(engine.workers);
  kv["like_threshold"] = format_double(like_threshold);
  kv["mean_user_factors"] = BoolText(mean_user_factors);
  kv["output_dir"] = output_dir.string();
  kv["dump_factors"] = BoolText(dump_factors);
  kv["timing"] = BoolText(timing);
  return kv;
}

ExperimentConfig resolve_config(const KeyValues& file, const KeyValues& overrides,
                                const char* env_seed) {
  KeyValues merged = file;
  if (env_seed != nullptr && overrides.count("seed") == 0) {
    merged["seed"] = env_seed;
  }
  for (const auto& [key, value] : overrides) {
    CheckKnown(key, "command line");
    merged[key] = value;
  }
  return parse_config(merged);
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData data;
  if (config.source == DataSource::kSynthetic) {
    SyntheticSpec spec = config.synthetic;
    spec.seed = config.seed;
    SyntheticData synth = synth_low_rank(spec);
    data.ratings = std::move(synth.ratings);
    data.truth = std::move(synth.truth);
  } else {
    data.ratings = load_ratings(config.data_path);
  }
  if (config.agents > data.ratings.items()) {
    throw ConfigError("agents " + std::to_string(config.agents) + " exceeds items " +
                      std::to_string(data.ratings.items()));
  }
  if (config.engine.rank > data.ratings.users()) {
    throw ConfigError("rank " + std::to_string(config.engine.rank) +
                      " exceeds users " + std::to_string(data.ratings.users()));
  }

  switch (config.topology) {
    case TopologyKind::kRing: data.topology = ring(config.agents); break;
    case TopologyKind::kComplete: data.topology = complete(config.agents); break;
    case TopologyKind::kErdosRenyi:
      data.topology = erdos_renyi(config.agents, config.edge_probability, config.seed);
      break;
    case TopologyKind::kFile:
      data.topology = load_topology(config.topology_path);
      if (data.topology.agents() != config.agents) {
        throw ConfigError("topology file has " +
                          std::to_string(data.topology.agents()) +
                          " agents, config has " + std::to_string(config.agents));
      }
      break;
  }

  data.split = split(data.ratings, config.split_fraction, config.seed,
                     config.stratified_split);
  return data;
}

std::string metrics_csv(const std::vector<IterationMetrics>& series) {
  std::string out =
      "iteration,objective,train_rmse,test_rmse,consensus_gap,dual_sum_norm,wall_ms\n";
  for (const IterationMetrics& m : series) {
    out += std::to_string(m.iteration);
    for (double v : {m.objective, m.train_rmse, m.test_rmse, m.consensus_gap,
                     m.dual_sum_norm, m.wall_ms}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace dmc
