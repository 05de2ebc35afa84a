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

// Experiment driver behind the mpl_lab CLI. One ExperimentConfig describes
// one run; Run() writes its artifacts into config.output_dir:
//
//   manifest.json  resolved config plus git-style hashes of every input file
//   metrics.csv    one row per (epoch, model) with the columns below
//   summary.json   final error rates (and recovery rates when references are
//                  configured); contains nothing time-dependent
//   *.ckpt         MPLCKPT1 checkpoints of the trained models
//   error.json     only on failure, with partial=true
//
// metrics.csv columns: run_id, mode, epoch, split, model, ter_percent,
// loss_sup, loss_unsup, empty_pl_fraction, mean_pl_len, alpha, w, lr,
// wall_clock_s.

#ifndef MPL_HARNESS_H_
#define MPL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpl/data.h"
#include "mpl/model.h"
#include "mpl/mpl.h"

namespace mpl {

enum class Mode {
  kGenData,
  kTrainBase,
  kTrainMpl,
  kTrainMplUnsup,
  kTrainPl,
  kTrainIpl,
  kTrainTopline,
  kEvaluate,
  kSweepW,
};

std::string ModeName(Mode mode);
Mode ParseMode(const std::string& name);

struct ExperimentPaths {
  std::filesystem::path corpus;
  std::filesystem::path output;
  std::filesystem::path base_checkpoint;  // init for every semi-supervised mode
  std::filesystem::path checkpoint;       // model scored by evaluate
  std::filesystem::path hyp_corpus;       // evaluate: score its labels instead
  std::filesystem::path base_summary;     // recovery-rate references
  std::filesystem::path topline_summary;
};

struct ExperimentConfig {
  Mode mode = Mode::kTrainBase;
  std::string run_id;  // defaults to "<mode>-s<seed>"
  ExperimentPaths paths;
  CorpusSpec corpus;
  Architecture arch;
  TrainConfig base_training;  // supervised base recipe (Noam schedule)
  TrainConfig training;       // MPL / PL / IPL / topline recipe (constant lr)
  double w = 0.5;
  std::vector<double> sweep_w = {0.0, 0.25, 0.5, 0.75, 1.0};
  int ipl_rounds = 4;
  int ipl_epochs_per_round = 10;
  std::string eval_domain = "auto";  // "in", "out", or "auto"
  std::uint64_t seed = 1;
  bool deterministic = false;

  // Desk-scale defaults for every field.
  static ExperimentConfig Defaults();
  void Validate() const;
};

// Field-for-field JSON. FromJson starts from Defaults() and overrides only
// the keys that are present.
nlohmann::json ConfigToJson(const ExperimentConfig& config);
ExperimentConfig ConfigFromJson(const nlohmann::json& j);

// Applies "a.b.c=value" to a config document. value is parsed as JSON when
// possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json& doc, const std::string& assignment);

// The default corpora used by the acceptance suite and the sample configs.
CorpusSpec InDomainCorpusSpec();
CorpusSpec ShiftedCorpusSpec();

// git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string GitBlobHash(const Bytes& content);

struct RunResult {
  nlohmann::json summary;
  std::filesystem::path output_dir;
};

// Executes one experiment. Throws mpl::Error (after writing error.json) on
// failure.
RunResult Run(const ExperimentConfig& config);

struct SweepRow {
  double w = 0.0;
  double alpha = 0.0;
  double online_dev_ter = 0.0;
  double offline_dev_ter = 0.0;
  double online_test_ter = 0.0;
  double offline_test_ter = 0.0;
  double max_empty_pl_fraction = 0.0;
  long empty_pseudo_labels = 0;
};

// One MPL run per w on a shared base checkpoint and corpus; the run for
// w_values[i] uses seed config.seed + i. Writes sweep.csv.
std::vector<SweepRow> SweepW(const ExperimentConfig& config,
                             std::span<const double> w_values);

}  // namespace mpl

#endif  // MPL_HARNESS_H_
