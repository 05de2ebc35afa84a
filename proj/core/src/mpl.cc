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

#include "mpl/mpl.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "mpl/metrics.h"
#include "seeding.h"

namespace mpl {

namespace {

enum SeedStream : std::uint64_t {
  kInitStream = 1,
  kShuffleStream = 2,
  kAugmentStream = 3,
};

struct BatchPlan {
  bool labeled = false;
  std::vector<size_t> indices;
};

long BatchesPerEpoch(size_t n_labeled, size_t n_unlabeled, int batch_size) {
  const auto ceil_div = [batch_size](size_t n) {
    return static_cast<long>((n + batch_size - 1) / batch_size);
  };
  return ceil_div(n_labeled) + ceil_div(n_unlabeled);
}

std::vector<BatchPlan> PlanEpoch(size_t n_labeled, size_t n_unlabeled,
                                 int batch_size, std::mt19937_64& rng) {
  std::vector<BatchPlan> plan;
  for (bool labeled : {true, false}) {
    const size_t n = labeled ? n_labeled : n_unlabeled;
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < n; start += batch_size) {
      BatchPlan b;
      b.labeled = labeled;
      b.indices.assign(order.begin() + start,
                       order.begin() + std::min(n, start + batch_size));
      plan.push_back(std::move(b));
    }
  }
  std::shuffle(plan.begin(), plan.end(), rng);
  return plan;
}

struct EpochTotals {
  double loss_sup = 0.0;
  long used_sup = 0;
  double loss_unsup = 0.0;
  long used_unsup = 0;
  long pseudo_labels = 0;
  long empty = 0;
  long pl_tokens = 0;
  long infeasible = 0;
  double lr = 0.0;
};

using LabelFn = std::function<TokenSequence(size_t)>;

// Owns the optimizer side of a run: online params, Adam state, rng streams.
class OnlineTrainer {
 public:
  OnlineTrainer(const ParamVector& init, const TrainConfig& config,
                std::uint64_t seed, const TrainHooks& hooks)
      : params_(init),
        adam_(AdamState::ForParams(init, config.adam)),
        config_(config),
        hooks_(hooks),
        shuffle_rng_(StreamSeed(seed, kShuffleStream, 0)),
        augment_rng_(StreamSeed(seed, kAugmentStream, 0)) {}

  // One pass over labeled and unlabeled batches. pseudo_label supplies the
  // targets of unlabeled utterances; after_step runs after every update.
  EpochTotals RunEpoch(std::span<const Utterance> labeled,
                       std::span<const Matrix> unlabeled,
                       const LabelFn& pseudo_label,
                       const std::function<void()>& after_step, int epoch) {
    EpochTotals totals;
    const auto plan = PlanEpoch(labeled.size(), unlabeled.size(),
                                config_.batch_size, shuffle_rng_);
    std::vector<Matrix> inputs;
    std::vector<TokenSequence> targets;
    std::vector<Example> examples;
    for (const BatchPlan& batch : plan) {
      inputs.clear();
      targets.clear();
      for (size_t i : batch.indices) {
        const Matrix* clean;
        if (batch.labeled) {
          clean = &labeled[i].features;
          targets.push_back(labeled[i].label);
        } else {
          clean = &unlabeled[i];
          TokenSequence label = pseudo_label(i);
          ++totals.pseudo_labels;
          totals.pl_tokens += static_cast<long>(label.size());
          if (label.empty()) {
            ++totals.empty;
            continue;
          }
          targets.push_back(std::move(label));
        }
        inputs.push_back(config_.augment ? ApplyAugment(*clean,
                                                        config_.augment_policy,
                                                        augment_rng_)
                                         : *clean);
        if (hooks_.on_loss_input) hooks_.on_loss_input(inputs.back());
      }
      if (inputs.empty()) continue;
      examples.clear();
      for (size_t k = 0; k < inputs.size(); ++k)
        examples.push_back({&inputs[k], &targets[k]});

      BatchLossAndGradient g;
      try {
        g = ComputeBatchLossAndGradient(params_, examples, config_.num_threads);
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged at epoch " +
                             std::to_string(epoch) + ", step " +
                             std::to_string(adam_.step + 1) + ": " + e.what());
      }
      totals.infeasible += g.infeasible;
      if (g.used == 0) continue;
      if (!std::isfinite(g.loss))
        throw NumericalError("non-finite loss at epoch " +
                             std::to_string(epoch) + ", step " +
                             std::to_string(adam_.step + 1));
      (batch.labeled ? totals.loss_sup : totals.loss_unsup) += g.loss;
      (batch.labeled ? totals.used_sup : totals.used_unsup) += g.used;

      const double lr =
          config_.use_noam ? config_.noam.Lr(adam_.step + 1) : config_.adam.lr;
      adam_.config.lr = lr;
      totals.lr = lr;
      ClipGradNorm(g.grad, config_.max_grad_norm);
      AdamStep(adam_, params_, g.grad);
      if (hooks_.on_online_update) hooks_.on_online_update(params_);
      if (after_step) after_step();
    }
    return totals;
  }

  const ParamVector& params() const { return params_; }
  long steps() const { return adam_.step; }

 private:
  ParamVector params_;
  AdamState adam_;
  const TrainConfig& config_;
  const TrainHooks& hooks_;
  std::mt19937_64 shuffle_rng_;
  std::mt19937_64 augment_rng_;
};

// Per-epoch snapshots ranked by validation error.
class CheckpointPool {
 public:
  void Add(const ParamVector& params, double valid_ter) {
    pool_.push_back({valid_ter, params});
  }
  bool empty() const { return pool_.empty(); }

  // Mean of the `best` lowest-error snapshots; ties keep the earlier epoch.
  // With no validation data (NaN errors) the most recent snapshots are used.
  ParamVector Average(int best) const {
    std::vector<size_t> order(pool_.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      const double ea = pool_[a].first, eb = pool_[b].first;
      if (std::isnan(ea) || std::isnan(eb)) return a > b;
      return ea < eb;
    });
    const size_t n = std::min(order.size(), static_cast<size_t>(std::max(1, best)));
    std::vector<ParamVector> chosen;
    for (size_t k = 0; k < n; ++k) chosen.push_back(pool_[order[k]].second);
    return AverageCheckpoints(chosen);
  }

 private:
  std::vector<std::pair<double, ParamVector>> pool_;
};

double ValidTer(const ParamVector& params, std::span<const Utterance> valid) {
  if (valid.empty()) return std::nan("");
  return EvaluateTer(params, valid);
}

void FillEpochRecord(EpochRecord& r, const EpochTotals& t, size_t n_unlabeled) {
  r.loss_sup = t.used_sup ? t.loss_sup / t.used_sup : 0.0;
  r.loss_unsup = t.used_unsup ? t.loss_unsup / t.used_unsup : 0.0;
  r.empty_pl_fraction =
      n_unlabeled ? static_cast<double>(t.empty) / t.pseudo_labels : 0.0;
  r.mean_pl_len =
      t.pseudo_labels ? static_cast<double>(t.pl_tokens) / t.pseudo_labels : 0.0;
  r.lr = t.lr;
  r.skipped_infeasible = t.infeasible;
  r.empty_pseudo_labels = t.empty;
}

void Accumulate(TrainStats& s, const EpochTotals& t, size_t n_unlabeled) {
  s.skipped_infeasible += t.infeasible;
  s.empty_pseudo_labels += t.empty;
  s.empty_pl_fraction.push_back(
      n_unlabeled ? static_cast<double>(t.empty) / t.pseudo_labels : 0.0);
}

void CheckTrainingInputs(std::span<const Utterance> labeled,
                         std::span<const Matrix> unlabeled,
                         const TrainConfig& config) {
  config.Validate();
  if (labeled.empty() && unlabeled.empty())
    throw InvalidArgument("training needs labeled or unlabeled data");
}

}  // namespace

double DeriveAlpha(double w, long batches_per_epoch) {
  if (!(w > 0.0 && w <= 1.0))
    throw InvalidArgument("w must lie in (0, 1]; w = 0 is the alpha = 0 mode");
  if (batches_per_epoch < 1)
    throw InvalidArgument("batches per epoch must be >= 1");
  return std::exp(std::log(w) / static_cast<double>(batches_per_epoch));
}

ParamVector EmaUpdate(const ParamVector& offline, const ParamVector& online,
                      double alpha) {
  ParamVector out = offline;
  EmaUpdateInPlace(out, online, alpha);
  return out;
}

void EmaUpdateInPlace(ParamVector& offline, const ParamVector& online,
                      double alpha) {
  if (!offline.SameShape(online))
    throw InvalidArgument("EMA update between different architectures");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("EMA coefficient must lie in [0, 1]");
  offline.values = alpha * offline.values + (1.0 - alpha) * online.values;
}

TokenSequence GeneratePseudoLabel(const ParamVector& model,
                                  const Matrix& features) {
  return BestPathDecode(Forward(model, features));
}

double EvaluateTer(const ParamVector& model, std::span<const Utterance> set) {
  std::vector<RefHypPair> pairs;
  pairs.reserve(set.size());
  for (const Utterance& u : set)
    pairs.emplace_back(u.label, GeneratePseudoLabel(model, u.features));
  return CorpusErrorRate(pairs);
}

double NoamSchedule::Lr(long step) const {
  const double f = factor > 0.0 ? factor : NoamFactorForPeak(peak_lr, warmup, dim);
  return NoamLr(step, warmup, f, dim);
}

void TrainConfig::Validate() const {
  if (epochs < 0 || batch_size < 1 || average_best < 1 || num_threads < 1)
    throw InvalidArgument(
        "train config needs epochs >= 0, batch_size >= 1, average_best >= 1, "
        "num_threads >= 1");
  if (!(adam.lr > 0.0)) throw InvalidArgument("learning rate must be > 0");
  augment_policy.Validate();
}

SupervisedResult TrainSupervised(const ParamVector& init,
                                 std::span<const Utterance> labeled,
                                 std::span<const Utterance> valid,
                                 const TrainConfig& config, std::uint64_t seed,
                                 const TrainHooks& hooks) {
  init.Validate();
  CheckTrainingInputs(labeled, {}, config);
  if (labeled.empty()) throw InvalidArgument("supervised training needs labeled data");
  SupervisedResult result;
  result.params = init;
  if (config.epochs == 0) return result;

  OnlineTrainer trainer(init, config, seed, hooks);
  CheckpointPool pool;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const EpochTotals t = trainer.RunEpoch(labeled, {}, {}, {}, epoch);
    const double ter = ValidTer(trainer.params(), valid);
    pool.Add(trainer.params(), ter);
    Accumulate(result.stats, t, 0);
    result.stats.valid_ter.push_back(ter);
    if (hooks.on_epoch) {
      EpochRecord r;
      r.epoch = epoch;
      r.model = "base";
      r.valid_ter = ter;
      FillEpochRecord(r, t, 0);
      hooks.on_epoch(r);
    }
  }
  result.stats.steps = trainer.steps();
  result.params = pool.Average(config.average_best);
  return result;
}

SupervisedResult SupervisedTrain(const Architecture& arch,
                                 std::span<const Utterance> labeled,
                                 std::span<const Utterance> valid,
                                 const TrainConfig& config, std::uint64_t seed,
                                 const TrainHooks& hooks) {
  return TrainSupervised(InitParams(arch, StreamSeed(seed, kInitStream, 0)),
                         labeled, valid, config, seed, hooks);
}

namespace {

MplResult RunMpl(const ParamVector& base, std::span<const Utterance> labeled,
                 std::span<const Matrix> unlabeled,
                 std::span<const Utterance> valid, const MplOptions& options,
                 const TrainConfig& config, std::uint64_t seed,
                 const TrainHooks& hooks) {
  base.Validate();
  CheckTrainingInputs(labeled, unlabeled, config);
  if (!(options.w >= 0.0 && options.w <= 1.0))
    throw InvalidArgument("w must lie in [0, 1]");

  MplResult result;
  MplState& state = result.final_state;
  state.online = base;
  state.offline = base;
  state.w = options.w;
  state.batches_per_epoch =
      BatchesPerEpoch(labeled.size(), unlabeled.size(), config.batch_size);
  state.alpha =
      options.w == 0.0 ? 0.0 : DeriveAlpha(options.w, state.batches_per_epoch);

  OnlineTrainer trainer(base, config, seed, hooks);
  CheckpointPool online_pool, offline_pool;
  const LabelFn pseudo_label = [&](size_t i) {
    if (hooks.on_pseudo_label_input) hooks.on_pseudo_label_input(unlabeled[i]);
    return GeneratePseudoLabel(state.offline, unlabeled[i]);
  };
  const auto ema = [&] {
    EmaUpdateInPlace(state.offline, trainer.params(), state.alpha);
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const EpochTotals t =
        trainer.RunEpoch(labeled, unlabeled, pseudo_label, ema, epoch);
    state.online = trainer.params();
    state.step = trainer.steps();
    const double online_ter = ValidTer(state.online, valid);
    const double offline_ter = ValidTer(state.offline, valid);
    online_pool.Add(state.online, online_ter);
    offline_pool.Add(state.offline, offline_ter);
    Accumulate(state.stats, t, unlabeled.size());
    state.stats.valid_ter.push_back(online_ter);
    result.offline_valid_ter.push_back(offline_ter);
    if (hooks.on_epoch) {
      for (const auto& [name, ter] : {std::pair{"online", online_ter},
                                      std::pair{"offline", offline_ter}}) {
        EpochRecord r;
        r.epoch = epoch;
        r.model = name;
        r.valid_ter = ter;
        r.alpha = state.alpha;
        r.w = state.w;
        FillEpochRecord(r, t, unlabeled.size());
        hooks.on_epoch(r);
      }
    }
  }
  state.stats.steps = trainer.steps();
  if (online_pool.empty()) {
    result.online = base;
    result.offline = base;
  } else {
    result.online = online_pool.Average(config.average_best);
    result.offline = offline_pool.Average(config.average_best);
  }
  return result;
}

}  // namespace

MplResult MplTrain(const ParamVector& base, std::span<const Utterance> labeled,
                   std::span<const Matrix> unlabeled,
                   std::span<const Utterance> valid, const MplOptions& options,
                   const TrainConfig& config, std::uint64_t seed,
                   const TrainHooks& hooks) {
  return RunMpl(base, labeled, unlabeled, valid, options, config, seed, hooks);
}

MplResult MplTrainUnsupOnly(const ParamVector& base,
                            std::span<const Matrix> unlabeled,
                            std::span<const Utterance> valid,
                            const MplOptions& options,
                            const TrainConfig& config, std::uint64_t seed,
                            const TrainHooks& hooks) {
  if (unlabeled.empty())
    throw InvalidArgument("unsupervised-only MPL needs unlabeled data");
  return RunMpl(base, {}, unlabeled, valid, options, config, seed, hooks);
}

IplResult IplTrain(const ParamVector& base, std::span<const Utterance> labeled,
                   std::span<const Matrix> unlabeled,
                   std::span<const Utterance> valid, int rounds,
                   int epochs_per_round, const TrainConfig& config,
                   std::uint64_t seed, const TrainHooks& hooks) {
  base.Validate();
  CheckTrainingInputs(labeled, unlabeled, config);
  if (rounds < 1) throw InvalidArgument("IPL needs rounds >= 1");
  if (epochs_per_round < 0) throw InvalidArgument("epochs_per_round must be >= 0");

  IplResult result;
  result.params = base;
  OnlineTrainer trainer(base, config, seed, hooks);
  ParamVector label_model = base;
  int epoch = 0;
  for (int round = 0; round < rounds; ++round) {
    std::vector<TokenSequence> labels;
    labels.reserve(unlabeled.size());
    for (const Matrix& x : unlabeled) {
      if (hooks.on_pseudo_label_input) hooks.on_pseudo_label_input(x);
      labels.push_back(GeneratePseudoLabel(label_model, x));
    }
    const LabelFn fixed = [&labels](size_t i) { return labels[i]; };

    CheckpointPool pool;
    for (int e = 0; e < epochs_per_round; ++e) {
      ++epoch;
      const EpochTotals t = trainer.RunEpoch(labeled, unlabeled, fixed, {}, epoch);
      const double ter = ValidTer(trainer.params(), valid);
      pool.Add(trainer.params(), ter);
      Accumulate(result.stats, t, unlabeled.size());
      result.stats.valid_ter.push_back(ter);
      if (hooks.on_epoch) {
        EpochRecord r;
        r.epoch = epoch;
        r.model = "student";
        r.valid_ter = ter;
        FillEpochRecord(r, t, unlabeled.size());
        hooks.on_epoch(r);
      }
    }
    label_model = trainer.params();
    result.round_models.push_back(
        pool.empty() ? trainer.params() : pool.Average(config.average_best));
    result.round_labels.push_back(std::move(labels));
  }
  result.stats.steps = trainer.steps();
  result.params = result.round_models.back();
  return result;
}

PlResult PlTrain(const ParamVector& base, std::span<const Utterance> labeled,
                 std::span<const Matrix> unlabeled,
                 std::span<const Utterance> valid, const TrainConfig& config,
                 std::uint64_t seed, const TrainHooks& hooks) {
  if (config.epochs == 0) {
    PlResult r;
    r.params = base;
    for (const Matrix& x : unlabeled) r.pseudo_labels.push_back(GeneratePseudoLabel(base, x));
    return r;
  }
  IplResult ipl = IplTrain(base, labeled, unlabeled, valid, 1, config.epochs,
                           config, seed, hooks);
  PlResult r;
  r.params = std::move(ipl.params);
  r.pseudo_labels = std::move(ipl.round_labels.front());
  r.stats = std::move(ipl.stats);
  return r;
}

}  // namespace mpl
