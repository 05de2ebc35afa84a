// Copyright 2026 The mpl-lab Authors
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

// Command-line front end for running experiments.
//
//   mpl_lab train-mpl --config exp.json --set mpl.w=0.25 --seed 3 --out runs/a

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mpl/harness.h"

namespace {

nlohmann::json LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mpl::InvalidArgument("cannot open config file " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw mpl::InvalidArgument("config file " + path + " is not a JSON object");
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum pseudo-labeling experiments on synthetic sequence data"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool deterministic = false;
  bool print_config = false;

  for (const char* name :
       {"gen-data", "train-base", "train-mpl", "train-mpl-unsup", "train-pl",
        "train-ipl", "train-topline", "evaluate", "sweep-w"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run mode ") + name);
    sub->add_option("-c,--config", config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "override a config key, e.g. mpl.w=0.25")
        ->take_all();
    sub->add_option("--seed", seed, "run seed");
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_flag("--deterministic", deterministic,
                  "single-threaded, bitwise reproducible run");
    sub->add_flag("--print-config", print_config,
                  "print the resolved config and exit");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();

  mpl::ExperimentConfig config;
  try {
    nlohmann::json doc = config_path.empty()
                             ? mpl::ConfigToJson(mpl::ExperimentConfig::Defaults())
                             : LoadConfigFile(config_path);
    doc["mode"] = mode;
    for (const std::string& o : overrides) mpl::ApplyOverride(doc, o);
    if (seed) doc["seed"] = *seed;
    if (!out_dir.empty()) doc["paths"]["output"] = out_dir;
    if (deterministic) doc["deterministic"] = true;
    config = mpl::ConfigFromJson(doc);
    if (print_config) {
      std::cout << mpl::ConfigToJson(config).dump(2) << '\n';
      return 0;
    }
    config.Validate();
  } catch (const mpl::Error& e) {
    std::cerr << "mpl_lab: " << e.what() << '\n';
    return 2;
  }

  try {
    const mpl::RunResult result = mpl::Run(config);
    std::cout << result.summary.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "mpl_lab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
