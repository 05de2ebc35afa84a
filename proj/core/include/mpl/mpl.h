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

// Semi-supervised training of CTC models with momentum pseudo-labeling.
//
// An online model is trained by gradient descent on labeled data and on
// unlabeled data whose targets are greedy pseudo-labels produced on the fly
// by an offline model. After every online update the offline model follows
// the online one by an exponential moving average
//
//     offline <- alpha * offline + (1 - alpha) * online
//
// with alpha chosen so that alpha^K = w, where K is the number of batches per
// epoch: w is the share of the starting model left in the offline model after
// one epoch.
//
// Also here: the supervised base/topline trainer and the standard and
// iterative pseudo-labeling baselines, which share the same batch loop.

#ifndef MPL_MPL_H_
#define MPL_MPL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mpl/augment.h"
#include "mpl/data.h"
#include "mpl/model.h"
#include "mpl/optim.h"

namespace mpl {

// exp(ln(w) / K). Requires w in (0, 1] and K >= 1.
double DeriveAlpha(double w, long batches_per_epoch);

// alpha * offline + (1 - alpha) * online, elementwise.
ParamVector EmaUpdate(const ParamVector& offline, const ParamVector& online,
                      double alpha);
void EmaUpdateInPlace(ParamVector& offline, const ParamVector& online,
                      double alpha);

// Greedy CTC decode of the model on clean (unaugmented) features.
TokenSequence GeneratePseudoLabel(const ParamVector& model,
                                  const Matrix& features);

// Pooled token error rate (percent) of greedy decoding over a labeled set.
double EvaluateTer(const ParamVector& model, std::span<const Utterance> set);

struct NoamSchedule {
  long warmup = 500;
  double factor = 0.0;  // 0: derive from peak_lr
  double peak_lr = 3e-3;
  int dim = 64;
  double Lr(long step) const;
};

struct TrainConfig {
  int epochs = 40;
  int batch_size = 16;
  AdamConfig adam;
  bool use_noam = false;  // when false the learning rate is adam.lr
  NoamSchedule noam;
  double max_grad_norm = 0.0;  // <= 0 disables clipping
  bool augment = true;
  AugmentPolicy augment_policy = AugmentPolicy::Default(16);
  int average_best = 10;  // checkpoints averaged at the end
  int num_threads = 1;

  void Validate() const;
};

// One row of per-epoch training metrics.
struct EpochRecord {
  int epoch = 0;         // 1-based
  std::string model;     // "base", "student", "online", "offline"
  double valid_ter = 0;  // percent
  double loss_sup = 0;   // mean per used labeled utterance
  double loss_unsup = 0; // mean per used pseudo-labeled utterance
  double empty_pl_fraction = 0;
  double mean_pl_len = 0;
  double alpha = 0;
  double w = 0;
  double lr = 0;
  long skipped_infeasible = 0;
  long empty_pseudo_labels = 0;
};

// Instrumentation points; all optional.
struct TrainHooks {
  // Features handed to pseudo-label generation.
  std::function<void(const Matrix&)> on_pseudo_label_input;
  // Features handed to the online loss (after augmentation).
  std::function<void(const Matrix&)> on_loss_input;
  // Online parameters right after each optimizer step.
  std::function<void(const ParamVector&)> on_online_update;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainStats {
  long steps = 0;
  long skipped_infeasible = 0;
  long empty_pseudo_labels = 0;
  std::vector<double> empty_pl_fraction;  // per epoch
  std::vector<double> valid_ter;          // per epoch, trained model
};

struct SupervisedResult {
  ParamVector params;  // checkpoint average
  TrainStats stats;
};

// Trains from init on labeled data with augmentation. With zero epochs init
// is returned unchanged.
SupervisedResult TrainSupervised(const ParamVector& init,
                                 std::span<const Utterance> labeled,
                                 std::span<const Utterance> valid,
                                 const TrainConfig& config, std::uint64_t seed,
                                 const TrainHooks& hooks = {});

// Base model: TrainSupervised from InitParams(arch, seed).
SupervisedResult SupervisedTrain(const Architecture& arch,
                                 std::span<const Utterance> labeled,
                                 std::span<const Utterance> valid,
                                 const TrainConfig& config, std::uint64_t seed,
                                 const TrainHooks& hooks = {});

struct MplOptions {
  // Base-model weight retained after one epoch. w == 0 selects alpha = 0
  // (online and offline share parameters) instead of DeriveAlpha.
  double w = 0.5;
};

struct MplState {
  ParamVector online;
  ParamVector offline;
  double alpha = 1.0;
  double w = 0.5;
  long batches_per_epoch = 1;  // K
  long step = 0;
  TrainStats stats;
};

struct MplResult {
  ParamVector online;   // checkpoint average of online snapshots
  ParamVector offline;  // checkpoint average of offline snapshots
  MplState final_state; // raw parameters after the last update
  std::vector<double> offline_valid_ter;  // per epoch
};

// Both models start from base. Each epoch visits the labeled and unlabeled
// batches in shuffled order; K counts both kinds.
MplResult MplTrain(const ParamVector& base, std::span<const Utterance> labeled,
                   std::span<const Matrix> unlabeled,
                   std::span<const Utterance> valid, const MplOptions& options,
                   const TrainConfig& config, std::uint64_t seed,
                   const TrainHooks& hooks = {});

// MplTrain with the labeled branch removed.
MplResult MplTrainUnsupOnly(const ParamVector& base,
                            std::span<const Matrix> unlabeled,
                            std::span<const Utterance> valid,
                            const MplOptions& options,
                            const TrainConfig& config, std::uint64_t seed,
                            const TrainHooks& hooks = {});

struct IplResult {
  ParamVector params;                    // model after the last round
  std::vector<ParamVector> round_models; // checkpoint average of each round
  std::vector<std::vector<TokenSequence>> round_labels;
  TrainStats stats;
};

// Pseudo-labels are regenerated at the start of every round from the current
// parameters (the base for round 1); training continues from those parameters
// and the optimizer state across rounds. Each round's reported model is the
// checkpoint average over that round's epochs.
IplResult IplTrain(const ParamVector& base, std::span<const Utterance> labeled,
                   std::span<const Matrix> unlabeled,
                   std::span<const Utterance> valid, int rounds,
                   int epochs_per_round, const TrainConfig& config,
                   std::uint64_t seed, const TrainHooks& hooks = {});

struct PlResult {
  ParamVector params;
  std::vector<TokenSequence> pseudo_labels;
  TrainStats stats;
};

// Standard pseudo-labeling: labels fixed from base, student started from base
// and trained for config.epochs. Same as one IPL round.
PlResult PlTrain(const ParamVector& base, std::span<const Utterance> labeled,
                 std::span<const Matrix> unlabeled,
                 std::span<const Utterance> valid, const TrainConfig& config,
                 std::uint64_t seed, const TrainHooks& hooks = {});

}  // namespace mpl

#endif  // MPL_MPL_H_
