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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpl/data.h"

namespace mpl {
namespace {

ParamVector Pair(double a, double b) {
  Architecture arch;
  arch.input_dim = 1;
  arch.context = 0;
  arch.hidden = 1;
  arch.n_hidden = 1;
  arch.vocab_size = 1;
  ParamVector p = ParamVector::Zeros(arch);
  p.values[0] = a;
  p.values[1] = b;
  return p;
}

ParamVector RandomLike(const ParamVector& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ParamVector p = shape;
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = n(rng);
  return p;
}

TEST(DeriveAlphaTest, ReproducesPublishedCoefficients) {
  EXPECT_NEAR(DeriveAlpha(0.5, 3013), 0.99977, 1e-5);
  EXPECT_NEAR(DeriveAlpha(0.5, 6301), 0.99989, 1e-5);
  EXPECT_NEAR(DeriveAlpha(0.5, 4077), 0.99983, 1e-5);
}

TEST(DeriveAlphaTest, TrivialCases) {
  EXPECT_EQ(DeriveAlpha(1.0, 1), 1.0);
  EXPECT_EQ(DeriveAlpha(1.0, 5000), 1.0);
  EXPECT_NEAR(DeriveAlpha(0.3, 1), 0.3, 1e-15);
  EXPECT_THROW(DeriveAlpha(0.0, 10), InvalidArgument);
  EXPECT_THROW(DeriveAlpha(-0.1, 10), InvalidArgument);
  EXPECT_THROW(DeriveAlpha(1.1, 10), InvalidArgument);
  EXPECT_THROW(DeriveAlpha(0.5, 0), InvalidArgument);
}

TEST(DeriveAlphaTest, RetainsWAfterKSteps) {
  for (int i = 1; i <= 9; ++i) {
    const double w = i / 10.0;
    for (long k : {1L, 10L, 3013L, 6301L})
      EXPECT_NEAR(std::pow(DeriveAlpha(w, k), static_cast<double>(k)), w, 1e-12)
          << "w=" << w << " K=" << k;
  }
}

TEST(DeriveAlphaTest, StrictlyIncreasingInWAndK) {
  for (long k : {1L, 7L, 100L, 3013L}) {
    double prev = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double a = DeriveAlpha(i / 10.0, k);
      EXPECT_GT(a, prev);
      prev = a;
    }
  }
  for (double w : {0.1, 0.5, 0.9}) {
    double prev = 0.0;
    for (long k : {1L, 2L, 10L, 100L, 1000L, 10000L}) {
      const double a = DeriveAlpha(w, k);
      EXPECT_GT(a, prev);
      prev = a;
    }
  }
}

TEST(EmaUpdateTest, Examples) {
  const ParamVector phi = Pair(1.0, 0.0), xi = Pair(0.0, 1.0);
  const ParamVector mixed = EmaUpdate(phi, xi, 0.9);
  EXPECT_NEAR(mixed.values[0], 0.9, 1e-15);
  EXPECT_NEAR(mixed.values[1], 0.1, 1e-15);
  EXPECT_EQ(EmaUpdate(phi, xi, 0.0).values, xi.values);
  EXPECT_EQ(EmaUpdate(phi, xi, 1.0).values, phi.values);
  const ParamVector other = InitParams(Architecture{}, 1);
  EXPECT_THROW(EmaUpdate(phi, other, 0.5), InvalidArgument);
  EXPECT_THROW(EmaUpdate(phi, xi, 1.5), InvalidArgument);
}

TEST(EmaUpdateTest, IteratedUpdateMatchesClosedForm) {
  std::mt19937_64 rng(3);
  Architecture arch;
  arch.input_dim = 3;
  arch.context = 1;
  arch.hidden = 4;
  arch.vocab_size = 3;
  const ParamVector phi0 = RandomLike(ParamVector::Zeros(arch), rng);
  const int k_steps = 1000;
  const double alpha = DeriveAlpha(0.5, k_steps);
  std::vector<ParamVector> xs;
  for (int k = 0; k < k_steps; ++k) xs.push_back(RandomLike(phi0, rng));

  ParamVector phi = phi0;
  for (const ParamVector& x : xs) EmaUpdateInPlace(phi, x, alpha);

  for (Eigen::Index i = 0; i < phi0.values.size(); ++i) {
    long double closed = std::pow(static_cast<long double>(alpha), k_steps) * phi0.values[i];
    for (int k = 1; k <= k_steps; ++k)
      closed += (1.0L - alpha) * std::pow(static_cast<long double>(alpha), k_steps - k) *
                xs[k - 1].values[i];
    EXPECT_NEAR(phi.values[i], static_cast<double>(closed), 1e-10);
  }
}

TEST(EmaUpdateTest, FrozenOnlineDecaysGeometrically) {
  std::mt19937_64 rng(4);
  const ParamVector phi0 = RandomLike(Pair(0, 0), rng);
  const ParamVector star = RandomLike(phi0, rng);
  const double alpha = 0.97;
  ParamVector phi = phi0;
  for (int k = 1; k <= 300; ++k) {
    EmaUpdateInPlace(phi, star, alpha);
    const Vector expected = std::pow(alpha, k) * (phi0.values - star.values);
    EXPECT_LT(((phi.values - star.values) - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(PseudoLabelTest, BlankConfidentModelGivesEmptyLabel) {
  Architecture arch;
  arch.input_dim = 2;
  arch.context = 1;
  arch.hidden = 3;
  arch.vocab_size = 4;
  ParamVector p = ParamVector::Zeros(arch);
  p.values[p.values.size() - 1] = 50.0;  // blank bias
  std::mt19937_64 rng(5);
  const Matrix x = Matrix::Random(9, 2);
  EXPECT_TRUE(GeneratePseudoLabel(p, x).empty());
}

TEST(PseudoLabelTest, Deterministic) {
  const ParamVector p = InitParams(Architecture{}, 6);
  const Matrix x = Matrix::Random(20, 16);
  EXPECT_EQ(GeneratePseudoLabel(p, x), GeneratePseudoLabel(p, x));
}

// A small corpus where a few epochs take well under a second.
struct Fixture {
  Corpus corpus;
  Architecture arch;
  TrainConfig config;
  ParamVector base;

  explicit Fixture(int n_labeled = 12, int n_unlabeled = 20) {
    CorpusSpec s;
    s.vocab_size = 4;
    s.feature_dim = 6;
    s.n_labeled = n_labeled;
    s.n_unlabeled = n_unlabeled;
    s.n_valid = 6;
    s.n_test = 6;
    s.min_len = 2;
    s.max_len = 4;
    s.seed = 21;
    corpus = GenerateCorpus(s);
    arch.input_dim = 6;
    arch.context = 1;
    arch.hidden = 8;
    arch.vocab_size = 4;
    config.epochs = 2;
    config.batch_size = 5;
    config.augment_policy = AugmentPolicy::Default(6);
    TrainConfig base_cfg = config;
    base_cfg.epochs = 3;
    base = SupervisedTrain(arch, corpus.labeled, corpus.valid_in, base_cfg, 1).params;
  }
};

TEST(SupervisedTrainTest, ZeroEpochsReturnsInitialization) {
  Fixture f;
  TrainConfig c = f.config;
  c.epochs = 0;
  const ParamVector init = InitParams(f.arch, 8);
  EXPECT_EQ(TrainSupervised(init, f.corpus.labeled, f.corpus.valid_in, c, 1).params.values,
            init.values);
}

TEST(SupervisedTrainTest, DeterministicAndBeatsUntrainedModel) {
  Fixture f;
  TrainConfig c = f.config;
  c.epochs = 30;
  c.adam.lr = 3e-3;
  const SupervisedResult a = SupervisedTrain(f.arch, f.corpus.labeled, f.corpus.valid_in, c, 2);
  const SupervisedResult b = SupervisedTrain(f.arch, f.corpus.labeled, f.corpus.valid_in, c, 2);
  EXPECT_EQ(a.params.values, b.params.values);
  EXPECT_EQ(a.stats.valid_ter, b.stats.valid_ter);
  EXPECT_EQ(a.stats.valid_ter.size(), 30u);
  const double untrained = EvaluateTer(InitParams(f.arch, 2), f.corpus.test_in);
  EXPECT_LT(EvaluateTer(a.params, f.corpus.test_in), untrained);
}

TEST(SupervisedTrainTest, RejectsEmptyLabeledSet) {
  Fixture f;
  EXPECT_THROW(SupervisedTrain(f.arch, {}, f.corpus.valid_in, f.config, 1), InvalidArgument);
}

TEST(MplTrainTest, AlphaFromBatchesOverBothSets) {
  Fixture f(12, 20);
  const MplResult r = MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                               f.corpus.valid_in, {0.5}, f.config, 3);
  EXPECT_EQ(r.final_state.batches_per_epoch, 3 + 4);
  EXPECT_DOUBLE_EQ(r.final_state.alpha, DeriveAlpha(0.5, 7));
  EXPECT_LT(std::abs(std::pow(r.final_state.alpha, 7) - 0.5), 1e-9);
  EXPECT_EQ(r.final_state.online.arch, r.final_state.offline.arch);
  EXPECT_EQ(r.offline_valid_ter.size(), 2u);
}

TEST(MplTrainTest, OfflineModelIsPureEmaOfOnlineSnapshots) {
  Fixture f;
  std::vector<ParamVector> snapshots;
  TrainHooks hooks;
  hooks.on_online_update = [&](const ParamVector& p) { snapshots.push_back(p); };
  const MplResult r = MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                               f.corpus.valid_in, {0.5}, f.config, 4, hooks);
  ASSERT_EQ(static_cast<long>(snapshots.size()), r.final_state.step);
  ParamVector replay = f.base;
  for (const ParamVector& s : snapshots) EmaUpdateInPlace(replay, s, r.final_state.alpha);
  EXPECT_EQ(replay.values, r.final_state.offline.values);
  EXPECT_EQ(snapshots.back().values, r.final_state.online.values);
}

TEST(MplTrainTest, RetentionOneFreezesOfflineModel) {
  Fixture f;
  const MplResult r = MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                               f.corpus.valid_in, {1.0}, f.config, 5);
  EXPECT_EQ(r.final_state.alpha, 1.0);
  EXPECT_EQ(r.final_state.offline.values, f.base.values);
  EXPECT_NE(r.final_state.online.values, f.base.values);
}

TEST(MplTrainTest, RetentionZeroSharesParameters) {
  Fixture f;
  const MplResult r = MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                               f.corpus.valid_in, {0.0}, f.config, 6);
  EXPECT_EQ(r.final_state.alpha, 0.0);
  EXPECT_EQ(r.final_state.offline.values, r.final_state.online.values);
  EXPECT_EQ(r.final_state.stats.empty_pl_fraction.size(), 2u);
}

TEST(MplTrainTest, WithoutUnlabeledDataNoPseudoLabelsAreMade) {
  Fixture f;
  int calls = 0;
  TrainHooks hooks;
  hooks.on_pseudo_label_input = [&](const Matrix&) { ++calls; };
  const MplResult r = MplTrain(f.base, f.corpus.labeled, {}, f.corpus.valid_in,
                               {0.5}, f.config, 7, hooks);
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(r.final_state.stats.empty_pseudo_labels, 0);
  EXPECT_EQ(r.final_state.batches_per_epoch, 3);
  EXPECT_THROW(MplTrain(f.base, {}, {}, f.corpus.valid_in, {0.5}, f.config, 7),
               InvalidArgument);
}

bool IsOneOf(const Matrix& x, std::span<const Matrix> set) {
  for (const Matrix& m : set)
    if (m.rows() == x.rows() && m == x) return true;
  return false;
}

TEST(MplTrainTest, PseudoLabelsUseCleanInputsAndLossUsesAugmented) {
  Fixture f;
  const std::vector<Matrix>& unlabeled = f.corpus.unlabeled_features;
  std::vector<Matrix> all = unlabeled;
  for (const Utterance& u : f.corpus.labeled) all.push_back(u.features);
  long pl_inputs = 0, clean_pl = 0, loss_inputs = 0, clean_loss = 0;
  TrainHooks hooks;
  hooks.on_pseudo_label_input = [&](const Matrix& x) {
    ++pl_inputs;
    clean_pl += IsOneOf(x, unlabeled);
  };
  hooks.on_loss_input = [&](const Matrix& x) {
    ++loss_inputs;
    clean_loss += IsOneOf(x, all);
  };
  MplTrain(f.base, f.corpus.labeled, unlabeled, f.corpus.valid_in, {0.5}, f.config, 8, hooks);
  EXPECT_EQ(pl_inputs, 2 * static_cast<long>(unlabeled.size()));
  EXPECT_EQ(clean_pl, pl_inputs);
  EXPECT_GT(loss_inputs, 0);
  EXPECT_LT(clean_loss, loss_inputs / 2);

  TrainConfig no_aug = f.config;
  no_aug.augment = false;
  loss_inputs = clean_loss = 0;
  MplTrain(f.base, f.corpus.labeled, unlabeled, f.corpus.valid_in, {0.5}, no_aug, 8, hooks);
  EXPECT_EQ(clean_loss, loss_inputs);
}

TEST(MplTrainTest, DeterministicAcrossRunsAndThreadCounts) {
  Fixture f;
  const auto run = [&](int threads) {
    TrainConfig c = f.config;
    c.num_threads = threads;
    return MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                    f.corpus.valid_in, {0.5}, c, 9);
  };
  const MplResult a = run(1), b = run(1), c = run(3);
  EXPECT_EQ(a.online.values, b.online.values);
  EXPECT_EQ(a.offline.values, b.offline.values);
  EXPECT_EQ(a.online.values, c.online.values);
  EXPECT_EQ(a.final_state.stats.valid_ter, c.final_state.stats.valid_ter);
}

TEST(MplTrainTest, UnsupervisedOnlyVariant) {
  Fixture f;
  std::vector<double> sup_losses;
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochRecord& r) { sup_losses.push_back(r.loss_sup); };
  const MplResult r = MplTrainUnsupOnly(f.base, f.corpus.unlabeled_features,
                                        f.corpus.valid_in, {0.5}, f.config, 10, hooks);
  EXPECT_EQ(r.final_state.batches_per_epoch, 4);
  for (double l : sup_losses) EXPECT_EQ(l, 0.0);
  EXPECT_THROW(MplTrainUnsupOnly(f.base, {}, f.corpus.valid_in, {0.5}, f.config, 10),
               InvalidArgument);
}

TEST(PlTrainTest, LabelsComeFromTheBaseModel) {
  Fixture f;
  const PlResult r = PlTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                             f.corpus.valid_in, f.config, 11);
  ASSERT_EQ(r.pseudo_labels.size(), f.corpus.unlabeled_features.size());
  for (size_t i = 0; i < r.pseudo_labels.size(); ++i)
    EXPECT_EQ(r.pseudo_labels[i], GeneratePseudoLabel(f.base, f.corpus.unlabeled_features[i]));
}

TEST(PlTrainTest, MatchesMplWithFrozenOfflineModel) {
  Fixture f;
  const PlResult pl = PlTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                              f.corpus.valid_in, f.config, 12);
  const MplResult mpl = MplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                                 f.corpus.valid_in, {1.0}, f.config, 12);
  EXPECT_EQ(pl.params.values, mpl.online.values);
}

TEST(IplTrainTest, SingleRoundIsStandardPl) {
  Fixture f;
  const PlResult pl = PlTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                              f.corpus.valid_in, f.config, 13);
  const IplResult ipl = IplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                                 f.corpus.valid_in, 1, f.config.epochs, f.config, 13);
  EXPECT_EQ(pl.params.values, ipl.params.values);
  EXPECT_EQ(pl.pseudo_labels, ipl.round_labels.front());
}

TEST(IplTrainTest, RoundsRegenerateLabels) {
  Fixture f;
  TrainConfig c = f.config;
  c.epochs = 1;
  c.adam.lr = 1e-2;
  const IplResult r = IplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                               f.corpus.valid_in, 3, 2, c, 14);
  ASSERT_EQ(r.round_models.size(), 3u);
  ASSERT_EQ(r.round_labels.size(), 3u);
  EXPECT_EQ(r.stats.valid_ter.size(), 6u);
  EXPECT_EQ(r.params.values, r.round_models.back().values);
  EXPECT_NE(r.round_labels[0], r.round_labels[2]);
  EXPECT_THROW(IplTrain(f.base, f.corpus.labeled, f.corpus.unlabeled_features,
                        f.corpus.valid_in, 0, 2, c, 14),
               InvalidArgument);
}

}  // namespace
}  // namespace mpl
