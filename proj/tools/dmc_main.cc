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

// Command line driver: run, baseline, synth, eval.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "dmc/errors.h"
#include "dmc/experiment.h"

namespace {

struct ConfigCommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

ConfigCommand AddConfigCommand(CLI::App& parent, const std::string& name,
                               const std::string& description) {
  ConfigCommand cmd;
  cmd.app = parent.add_subcommand(name, description);
  return cmd;
}

// Registered after the ConfigCommand has its final address, since CLI11
// binds options by reference.
void RegisterKeys(ConfigCommand& cmd) {
  cmd.app->add_option("config", cmd.config_path, "INI or JSON experiment config");
  for (const auto& [key, fallback] : dmc::default_key_values()) {
    cmd.options[key] = cmd.app->add_option("--" + key, cmd.values[key],
                                           "override '" + key + "' (default " +
                                               (fallback.empty() ? "\"\"" : fallback) +
                                               ")");
  }
}

int RunConfigCommand(const ConfigCommand& cmd, bool baseline) {
  dmc::ExperimentConfig config;
  try {
    dmc::KeyValues file;
    if (!cmd.config_path.empty()) file = dmc::read_config_file(cmd.config_path);
    dmc::KeyValues overrides;
    for (const auto& [key, opt] : cmd.options) {
      if (opt->count() > 0) overrides[key] = cmd.values.at(key);
    }
    config = dmc::resolve_config(file, overrides, std::getenv("DMC_SEED"));
  } catch (const dmc::Error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return dmc::kExitInvalid;
  }
  return baseline ? dmc::cmd_baseline(config, std::cout, std::cerr)
                  : dmc::cmd_run(config, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized matrix completion for collaborative filtering"};
  app.require_subcommand(1);

  ConfigCommand run = AddConfigCommand(app, "run", "Run the decentralized engine");
  RegisterKeys(run);
  ConfigCommand baseline =
      AddConfigCommand(app, "baseline", "Run the centralized reference solver");
  RegisterKeys(baseline);

  dmc::SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic low-rank dataset");
  synth_cmd->add_option("--users", synth.spec.users, "Number of users");
  synth_cmd->add_option("--items", synth.spec.items, "Number of items");
  synth_cmd->add_option("--rank", synth.spec.rank, "Generating rank");
  synth_cmd->add_option("--fraction", synth.spec.observe_fraction,
                        "Fraction of cells observed");
  synth_cmd->add_option("--noise", synth.spec.noise_sd, "Noise standard deviation");
  CLI::Option* synth_seed = synth_cmd->add_option("--seed", synth.spec.seed, "Seed");
  synth_cmd->add_option("--output,-o", synth.output, "Ratings file to write");
  synth_cmd->add_option("--truth", synth.truth_output,
                        "Ground-truth file (default <output>.truth.csv)");

  dmc::EvalOptions eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Score a factor dump against a test file");
  eval_cmd->add_option("--factors", eval.factors_dir, "factors/ directory of a run")
      ->required();
  eval_cmd->add_option("--test", eval.test_path, "Test ratings file")->required();
  eval_cmd->add_option("--threshold", eval.like_threshold,
                       "Ratings >= threshold count as liked");
  eval_cmd->add_option("--output-dir", eval.output_dir, "Where to write summary.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dmc::kExitInvalid;
  }

  if (*run.app) return RunConfigCommand(run, false);
  if (*baseline.app) return RunConfigCommand(baseline, true);
  if (*synth_cmd) {
    if (synth_seed->count() == 0) {
      if (const char* env = std::getenv("DMC_SEED")) {
        try {
          synth.spec.seed = std::stoull(env);
        } catch (const std::exception&) {
          std::cerr << "invalid DMC_SEED '" << env << "'\n";
          return dmc::kExitInvalid;
        }
      }
    }
    return dmc::cmd_synth(synth, std::cout, std::cerr);
  }
  return dmc::cmd_eval(eval, std::cout, std::cerr);
}
