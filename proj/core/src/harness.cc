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

#include "mpl/harness.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json_util.h"
#include "mpl/checkpoint.h"
#include "mpl/metrics.h"

namespace mpl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<Mode, const char*> kModeNames[] = {
    {Mode::kGenData, "gen-data"},         {Mode::kTrainBase, "train-base"},
    {Mode::kTrainMpl, "train-mpl"},       {Mode::kTrainMplUnsup, "train-mpl-unsup"},
    {Mode::kTrainPl, "train-pl"},         {Mode::kTrainIpl, "train-ipl"},
    {Mode::kTrainTopline, "train-topline"}, {Mode::kEvaluate, "evaluate"},
    {Mode::kSweepW, "sweep-w"},
};

json AugmentToJson(const TrainConfig& t) {
  const AugmentPolicy& p = t.augment_policy;
  return {{"enabled", t.augment},
          {"n_time_masks", p.n_time_masks},
          {"max_time_width", p.max_time_width},
          {"max_time_fraction", p.max_time_fraction},
          {"n_feat_masks", p.n_feat_masks},
          {"max_feat_width", p.max_feat_width},
          {"fill_value", p.fill_value}};
}

void AugmentFromJson(const json& j, TrainConfig& t) {
  AugmentPolicy& p = t.augment_policy;
  t.augment = j.value("enabled", t.augment);
  p.n_time_masks = j.value("n_time_masks", p.n_time_masks);
  p.max_time_width = j.value("max_time_width", p.max_time_width);
  p.max_time_fraction = j.value("max_time_fraction", p.max_time_fraction);
  p.n_feat_masks = j.value("n_feat_masks", p.n_feat_masks);
  p.max_feat_width = j.value("max_feat_width", p.max_feat_width);
  p.fill_value = j.value("fill_value", p.fill_value);
}

json TrainingToJson(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.adam.lr},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"eps", t.adam.eps},
          {"noam",
           {{"enabled", t.use_noam},
            {"warmup", t.noam.warmup},
            {"factor", t.noam.factor},
            {"peak_lr", t.noam.peak_lr},
            {"dim", t.noam.dim}}},
          {"max_grad_norm", t.max_grad_norm},
          {"average_best", t.average_best},
          {"threads", t.num_threads}};
}

void TrainingFromJson(const json& j, TrainConfig& t) {
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.adam.lr = j.value("lr", t.adam.lr);
  t.adam.beta1 = j.value("beta1", t.adam.beta1);
  t.adam.beta2 = j.value("beta2", t.adam.beta2);
  t.adam.eps = j.value("eps", t.adam.eps);
  if (j.contains("noam")) {
    const json& n = j.at("noam");
    t.use_noam = n.value("enabled", t.use_noam);
    t.noam.warmup = n.value("warmup", t.noam.warmup);
    t.noam.factor = n.value("factor", t.noam.factor);
    t.noam.peak_lr = n.value("peak_lr", t.noam.peak_lr);
    t.noam.dim = n.value("dim", t.noam.dim);
  }
  t.max_grad_norm = j.value("max_grad_norm", t.max_grad_norm);
  t.average_best = j.value("average_best", t.average_best);
  t.num_threads = j.value("threads", t.num_threads);
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

class MetricsCsv {
 public:
  explicit MetricsCsv(const fs::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    out_ << "run_id,mode,epoch,split,model,ter_percent,loss_sup,loss_unsup,"
            "empty_pl_fraction,mean_pl_len,alpha,w,lr,wall_clock_s\n";
    start_ = std::chrono::steady_clock::now();
  }

  void Write(const std::string& run_id, Mode mode, const EpochRecord& r) {
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    out_ << run_id << ',' << ModeName(mode) << ',' << r.epoch << ",valid,"
         << r.model << ',' << FormatDouble(r.valid_ter) << ','
         << FormatDouble(r.loss_sup) << ',' << FormatDouble(r.loss_unsup) << ','
         << FormatDouble(r.empty_pl_fraction) << ','
         << FormatDouble(r.mean_pl_len) << ',' << FormatDouble(r.alpha) << ','
         << FormatDouble(r.w) << ',' << FormatDouble(r.lr) << ','
         << FormatDouble(elapsed) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::chrono::steady_clock::time_point start_;
};

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// The evaluation domain's validation and test splits.
struct EvalSplits {
  std::string domain;
  const std::vector<Utterance>* valid;
  const std::vector<Utterance>* test;
};

EvalSplits ResolveSplits(const ExperimentConfig& config, const Corpus& corpus) {
  std::string domain = config.eval_domain;
  if (domain == "auto") domain = corpus.spec.Shifted() ? "out" : "in";
  if (domain == "out" && !corpus.spec.Shifted())
    throw InvalidArgument("eval_domain 'out' needs a corpus with a domain shift");
  if (domain == "in") return {domain, &corpus.valid_in, &corpus.test_in};
  return {domain, &corpus.valid_out, &corpus.test_out};
}

double TerOrNull(const ParamVector& model, const std::vector<Utterance>& set) {
  return set.empty() ? std::nan("") : EvaluateTer(model, set);
}

json NumberOrNull(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json ModelReport(const ParamVector& model, const Corpus& corpus,
                 const EvalSplits& splits) {
  json r = {{"valid_ter_percent", NumberOrNull(TerOrNull(model, *splits.valid))},
            {"test_ter_percent", NumberOrNull(TerOrNull(model, *splits.test))},
            {"test_in_ter_percent", NumberOrNull(TerOrNull(model, corpus.test_in))}};
  if (corpus.spec.Shifted())
    r["test_out_ter_percent"] = NumberOrNull(TerOrNull(model, corpus.test_out));
  return r;
}

json StatsToJson(const TrainStats& s) {
  const double max_empty =
      s.empty_pl_fraction.empty()
          ? 0.0
          : *std::max_element(s.empty_pl_fraction.begin(), s.empty_pl_fraction.end());
  return {{"steps", s.steps},
          {"skipped_infeasible", s.skipped_infeasible},
          {"empty_pseudo_labels", s.empty_pseudo_labels},
          {"max_empty_pl_fraction", max_empty},
          {"empty_pl_fraction_per_epoch", s.empty_pl_fraction},
          {"valid_ter_per_epoch", s.valid_ter}};
}

// Adds "wrr_percent" when base and topline summaries are configured.
void AddRecoveryRate(const ExperimentConfig& config, json& summary) {
  if (config.paths.base_summary.empty() || config.paths.topline_summary.empty())
    return;
  const double base =
      ReadJsonFile(config.paths.base_summary).at("test_ter_percent").get<double>();
  const double topline = ReadJsonFile(config.paths.topline_summary)
                             .at("test_ter_percent")
                             .get<double>();
  summary["wrr_reference"] = {{"base_test_ter_percent", base},
                              {"topline_test_ter_percent", topline}};
  summary["wrr_percent"] = WerRecoveryRate(
      base, summary.at("test_ter_percent").get<double>(), topline);
}

void SetPrimary(json& summary, const std::string& model) {
  summary["evaluation_model"] = model;
  summary["valid_ter_percent"] = summary["models"][model]["valid_ter_percent"];
  summary["test_ter_percent"] = summary["models"][model]["test_ter_percent"];
}

void SaveModel(const fs::path& dir, const std::string& name,
               const ParamVector& params, long step) {
  SaveCheckpoint(dir / (name + ".ckpt"), {params, step});
}

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config)
      : config_(config),
        out_(config.paths.output),
        run_id_(config.run_id.empty()
                    ? ModeName(config.mode) + "-s" + std::to_string(config.seed)
                    : config.run_id) {
    if (config_.deterministic) {
      config_.training.num_threads = 1;
      config_.base_training.num_threads = 1;
    }
  }

  json Execute() {
    fs::create_directories(out_);
    WriteManifest();
    metrics_.emplace(out_ / "metrics.csv");
    json summary = {{"run_id", run_id_},
                    {"mode", ModeName(config_.mode)},
                    {"seed", config_.seed}};
    switch (config_.mode) {
      case Mode::kGenData: GenData(summary); break;
      case Mode::kTrainBase: TrainBase(summary); break;
      case Mode::kTrainTopline: TrainTopline(summary); break;
      case Mode::kTrainMpl:
      case Mode::kTrainMplUnsup: TrainMpl(summary); break;
      case Mode::kTrainPl: TrainPl(summary); break;
      case Mode::kTrainIpl: TrainIpl(summary); break;
      case Mode::kEvaluate: Evaluate(summary); break;
      case Mode::kSweepW: Sweep(summary); break;
    }
    if (summary.contains("test_ter_percent") &&
        summary["test_ter_percent"].is_number())
      AddRecoveryRate(config_, summary);
    WriteJson(out_ / "summary.json", summary);
    return summary;
  }

  std::vector<SweepRow> SweepRows(std::span<const double> w_values) {
    const Corpus corpus = LoadCorpus(config_.paths.corpus);
    const EvalSplits splits = ResolveSplits(config_, corpus);
    const ParamVector base = LoadBase();
    std::vector<SweepRow> rows;
    for (size_t i = 0; i < w_values.size(); ++i) {
      const double w = w_values[i];
      const std::string point_id = run_id_ + "-w" + FormatDouble(w);
      const MplResult r =
          MplTrain(base, corpus.labeled, corpus.unlabeled_features,
                   *splits.valid, {w}, config_.training, config_.seed + i,
                   Hooks(point_id, "online"));
      SweepRow row;
      row.w = w;
      row.alpha = r.final_state.alpha;
      row.online_dev_ter = EvaluateTer(r.online, *splits.valid);
      row.offline_dev_ter = EvaluateTer(r.offline, *splits.valid);
      row.online_test_ter = EvaluateTer(r.online, *splits.test);
      row.offline_test_ter = EvaluateTer(r.offline, *splits.test);
      const auto& fr = r.final_state.stats.empty_pl_fraction;
      row.max_empty_pl_fraction =
          fr.empty() ? 0.0 : *std::max_element(fr.begin(), fr.end());
      row.empty_pseudo_labels = r.final_state.stats.empty_pseudo_labels;
      rows.push_back(row);
    }
    std::ofstream csv(out_ / "sweep.csv", std::ios::trunc);
    csv << "w,alpha,online_dev_ter,offline_dev_ter,online_test_ter,"
           "offline_test_ter,max_empty_pl_fraction,empty_pseudo_labels\n";
    for (const SweepRow& r : rows)
      csv << FormatDouble(r.w) << ',' << FormatDouble(r.alpha) << ','
          << FormatDouble(r.online_dev_ter) << ','
          << FormatDouble(r.offline_dev_ter) << ','
          << FormatDouble(r.online_test_ter) << ','
          << FormatDouble(r.offline_test_ter) << ','
          << FormatDouble(r.max_empty_pl_fraction) << ','
          << r.empty_pseudo_labels << '\n';
    return rows;
  }

  void PrepareOutput() {
    fs::create_directories(out_);
    metrics_.emplace(out_ / "metrics.csv");
  }

 private:
  TrainHooks Hooks(const std::string& run_id, const std::string& rename = "") {
    TrainHooks hooks;
    hooks.on_epoch = [this, run_id, rename](const EpochRecord& r) {
      EpochRecord copy = r;
      if (!rename.empty() && r.model == "base") copy.model = rename;
      metrics_->Write(run_id, config_.mode, copy);
    };
    return hooks;
  }

  void WriteManifest() {
    json inputs = json::object();
    const std::pair<const char*, const fs::path*> files[] = {
        {"corpus", &config_.paths.corpus},
        {"base_checkpoint", &config_.paths.base_checkpoint},
        {"checkpoint", &config_.paths.checkpoint},
        {"hyp_corpus", &config_.paths.hyp_corpus},
        {"base_summary", &config_.paths.base_summary},
        {"topline_summary", &config_.paths.topline_summary}};
    for (const auto& [name, path] : files) {
      if (path->empty() || !fs::exists(*path)) continue;
      inputs[name] = {{"path", path->string()},
                      {"git_hash", GitBlobHash(ReadFileBytes(*path))}};
    }
    WriteJson(out_ / "manifest.json", {{"run_id", run_id_},
                                       {"config", ConfigToJson(config_)},
                                       {"inputs", inputs}});
  }

  Corpus LoadInputCorpus() {
    if (config_.paths.corpus.empty())
      throw InvalidArgument("mode " + ModeName(config_.mode) +
                            " needs paths.corpus");
    Corpus corpus = LoadCorpus(config_.paths.corpus);
    if (corpus.spec.feature_dim != config_.arch.input_dim ||
        corpus.spec.vocab_size != config_.arch.vocab_size)
      throw InvalidArgument("corpus D/V do not match arch D/V");
    return corpus;
  }

  ParamVector LoadBase() {
    if (config_.paths.base_checkpoint.empty())
      throw InvalidArgument("mode " + ModeName(config_.mode) +
                            " needs paths.base_checkpoint");
    return LoadCheckpoint(config_.paths.base_checkpoint).params;
  }

  void GenData(json& summary) {
    const Corpus corpus = GenerateCorpus(config_.corpus);
    const fs::path path = config_.paths.corpus.empty()
                              ? out_ / "corpus.mplcorp"
                              : config_.paths.corpus;
    const Bytes bytes = EncodeCorpus(corpus);
    WriteFileBytes(path, bytes);
    summary["corpus"] = {{"path", path.string()},
                         {"git_hash", GitBlobHash(bytes)},
                         {"labeled", corpus.labeled.size()},
                         {"unlabeled", corpus.unlabeled_features.size()},
                         {"valid_in", corpus.valid_in.size()},
                         {"test_in", corpus.test_in.size()},
                         {"valid_out", corpus.valid_out.size()},
                         {"test_out", corpus.test_out.size()}};
  }

  void TrainBase(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    const SupervisedResult r =
        SupervisedTrain(config_.arch, corpus.labeled, corpus.valid_in,
                        config_.base_training, config_.seed, Hooks(run_id_));
    SaveModel(out_, "base", r.params, r.stats.steps);
    summary["eval_domain"] = splits.domain;
    summary["models"]["base"] = ModelReport(r.params, corpus, splits);
    summary["stats"] = StatsToJson(r.stats);
    SetPrimary(summary, "base");
  }

  void TrainTopline(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    std::vector<Utterance> all = corpus.labeled;
    for (Utterance& u : corpus.RevealUnlabeled()) all.push_back(std::move(u));
    const SupervisedResult r =
        TrainSupervised(LoadBase(), all, *splits.valid, config_.training,
                        config_.seed, Hooks(run_id_, "student"));
    SaveModel(out_, "topline", r.params, r.stats.steps);
    summary["eval_domain"] = splits.domain;
    summary["models"]["topline"] = ModelReport(r.params, corpus, splits);
    summary["stats"] = StatsToJson(r.stats);
    SetPrimary(summary, "topline");
  }

  void TrainMpl(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    const ParamVector base = LoadBase();
    const MplOptions options{config_.w};
    const MplResult r =
        config_.mode == Mode::kTrainMplUnsup
            ? MplTrainUnsupOnly(base, corpus.unlabeled_features, *splits.valid,
                                options, config_.training, config_.seed,
                                Hooks(run_id_))
            : MplTrain(base, corpus.labeled, corpus.unlabeled_features,
                       *splits.valid, options, config_.training, config_.seed,
                       Hooks(run_id_));
    SaveModel(out_, "online", r.online, r.final_state.step);
    SaveModel(out_, "offline", r.offline, r.final_state.step);
    summary["eval_domain"] = splits.domain;
    summary["models"]["online"] = ModelReport(r.online, corpus, splits);
    summary["models"]["offline"] = ModelReport(r.offline, corpus, splits);
    summary["mpl"] = {{"w", r.final_state.w},
                      {"alpha", r.final_state.alpha},
                      {"batches_per_epoch", r.final_state.batches_per_epoch},
                      {"offline_valid_ter_per_epoch", r.offline_valid_ter}};
    summary["stats"] = StatsToJson(r.final_state.stats);
    SetPrimary(summary, "online");
  }

  void TrainPl(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    const PlResult r =
        PlTrain(LoadBase(), corpus.labeled, corpus.unlabeled_features,
                *splits.valid, config_.training, config_.seed, Hooks(run_id_));
    SaveModel(out_, "student", r.params, r.stats.steps);
    summary["eval_domain"] = splits.domain;
    summary["models"]["student"] = ModelReport(r.params, corpus, splits);
    summary["stats"] = StatsToJson(r.stats);
    SetPrimary(summary, "student");
  }

  void TrainIpl(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    const IplResult r = IplTrain(
        LoadBase(), corpus.labeled, corpus.unlabeled_features, *splits.valid,
        config_.ipl_rounds, config_.ipl_epochs_per_round, config_.training,
        config_.seed, Hooks(run_id_));
    json rounds = json::array();
    for (size_t k = 0; k < r.round_models.size(); ++k) {
      SaveModel(out_, "round" + std::to_string(k + 1), r.round_models[k],
                r.stats.steps);
      rounds.push_back(ModelReport(r.round_models[k], corpus, splits));
    }
    SaveModel(out_, "student", r.params, r.stats.steps);
    summary["eval_domain"] = splits.domain;
    summary["models"]["student"] = ModelReport(r.params, corpus, splits);
    summary["rounds"] = rounds;
    summary["stats"] = StatsToJson(r.stats);
    SetPrimary(summary, "student");
  }

  void Evaluate(json& summary) {
    const Corpus corpus = LoadInputCorpus();
    const EvalSplits splits = ResolveSplits(config_, corpus);
    summary["eval_domain"] = splits.domain;
    if (!config_.paths.hyp_corpus.empty()) {
      const Corpus hyp = LoadCorpus(config_.paths.hyp_corpus);
      const auto score = [](const std::vector<Utterance>& ref,
                            const std::vector<Utterance>& h) -> json {
        if (ref.empty()) return nullptr;
        if (ref.size() != h.size())
          throw InvalidArgument("hypothesis corpus split sizes differ from reference");
        std::vector<RefHypPair> pairs;
        for (size_t i = 0; i < ref.size(); ++i)
          pairs.emplace_back(ref[i].label, h[i].label);
        return CorpusErrorRate(pairs);
      };
      const EvalSplits hyp_splits = ResolveSplits(config_, hyp);
      summary["models"]["hypotheses"] = {
          {"valid_ter_percent", score(*splits.valid, *hyp_splits.valid)},
          {"test_ter_percent", score(*splits.test, *hyp_splits.test)},
          {"test_in_ter_percent", score(corpus.test_in, hyp.test_in)}};
      SetPrimary(summary, "hypotheses");
      return;
    }
    if (config_.paths.checkpoint.empty())
      throw InvalidArgument("evaluate needs paths.checkpoint or paths.hyp_corpus");
    const Checkpoint ck = LoadCheckpoint(config_.paths.checkpoint);
    summary["models"]["checkpoint"] = ModelReport(ck.params, corpus, splits);
    summary["checkpoint_step"] = ck.step;
    SetPrimary(summary, "checkpoint");
  }

  void Sweep(json& summary) {
    const std::vector<SweepRow> rows = SweepRows(config_.sweep_w);
    json table = json::array();
    for (const SweepRow& r : rows)
      table.push_back({{"w", r.w},
                       {"alpha", r.alpha},
                       {"online_dev_ter", r.online_dev_ter},
                       {"offline_dev_ter", r.offline_dev_ter},
                       {"online_test_ter", r.online_test_ter},
                       {"offline_test_ter", r.offline_test_ter},
                       {"max_empty_pl_fraction", r.max_empty_pl_fraction},
                       {"empty_pseudo_labels", r.empty_pseudo_labels}});
    summary["sweep"] = table;
  }

  ExperimentConfig config_;
  fs::path out_;
  std::string run_id_;
  std::optional<MetricsCsv> metrics_;
};

}  // namespace

std::string ModeName(Mode mode) {
  for (const auto& [m, name] : kModeNames)
    if (m == mode) return name;
  return "unknown";
}

Mode ParseMode(const std::string& name) {
  for (const auto& [m, n] : kModeNames)
    if (name == n) return m;
  throw InvalidArgument("unknown mode '" + name + "'");
}

CorpusSpec InDomainCorpusSpec() {
  CorpusSpec s;
  s.vocab_size = 8;
  s.feature_dim = 16;
  s.n_labeled = 200;
  s.n_unlabeled = 2000;
  s.n_valid = 200;
  s.n_test = 200;
  s.min_len = 3;
  s.max_len = 10;
  s.min_frames = 2;
  s.max_frames = 5;
  s.noise_std = 0.3;
  s.prototype_std = 0.25;
  s.seed = 1;
  return s;
}

CorpusSpec ShiftedCorpusSpec() {
  CorpusSpec s = InDomainCorpusSpec();
  s.shifts = {{DomainShift::Kind::kLinearTransform, 0.4},
              {DomainShift::Kind::kNoiseScale, 1.5}};
  return s;
}

ExperimentConfig ExperimentConfig::Defaults() {
  ExperimentConfig c;
  c.corpus = InDomainCorpusSpec();
  c.arch = Architecture{};
  c.arch.input_dim = c.corpus.feature_dim;
  c.arch.vocab_size = c.corpus.vocab_size;

  TrainConfig& b = c.base_training;
  b.epochs = 100;
  b.batch_size = 16;
  b.adam = {1e-3, 0.9, 0.98, 1e-9};
  b.use_noam = true;
  b.noam.warmup = 500;
  b.noam.peak_lr = 3e-3;
  b.noam.dim = c.arch.hidden;
  b.augment_policy = AugmentPolicy::Default(c.corpus.feature_dim);
  b.augment_policy.n_feat_masks = 0;

  TrainConfig& t = c.training;
  t.epochs = 40;
  t.batch_size = 16;
  t.adam = {1e-3, 0.9, 0.999, 1e-8};
  t.use_noam = false;
  t.augment_policy = b.augment_policy;
  return c;
}

void ExperimentConfig::Validate() const {
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("w must lie in [0, 1]");
  for (double v : sweep_w)
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidArgument("sweep_w values must lie in [0, 1]");
  if (eval_domain != "auto" && eval_domain != "in" && eval_domain != "out")
    throw InvalidArgument("eval.domain must be 'auto', 'in' or 'out'");
  if (ipl_rounds < 1 || ipl_epochs_per_round < 0)
    throw InvalidArgument("ipl.rounds must be >= 1 and epochs_per_round >= 0");
  arch.Validate();
  base_training.Validate();
  training.Validate();
  if (paths.output.empty()) throw InvalidArgument("paths.output is required");
  switch (mode) {
    case Mode::kGenData: corpus.Validate(); break;
    case Mode::kTrainBase:
      if (paths.corpus.empty()) throw InvalidArgument("paths.corpus is required");
      break;
    case Mode::kEvaluate:
      if (paths.corpus.empty()) throw InvalidArgument("paths.corpus is required");
      if (paths.checkpoint.empty() && paths.hyp_corpus.empty())
        throw InvalidArgument("evaluate needs paths.checkpoint or paths.hyp_corpus");
      break;
    default:
      if (paths.corpus.empty() || paths.base_checkpoint.empty())
        throw InvalidArgument("mode " + ModeName(mode) +
                              " needs paths.corpus and paths.base_checkpoint");
      if (mode == Mode::kSweepW && sweep_w.empty())
        throw InvalidArgument("sweep-w needs a non-empty mpl.sweep_w list");
  }
}

json ConfigToJson(const ExperimentConfig& c) {
  json base_training = TrainingToJson(c.base_training);
  json training = TrainingToJson(c.training);
  return {{"mode", ModeName(c.mode)},
          {"run_id", c.run_id},
          {"paths",
           {{"corpus", c.paths.corpus.string()},
            {"output", c.paths.output.string()},
            {"base_checkpoint", c.paths.base_checkpoint.string()},
            {"checkpoint", c.paths.checkpoint.string()},
            {"hyp_corpus", c.paths.hyp_corpus.string()},
            {"base_summary", c.paths.base_summary.string()},
            {"topline_summary", c.paths.topline_summary.string()}}},
          {"corpus", CorpusSpecToJson(c.corpus)},
          {"arch", ArchToJson(c.arch)},
          {"base_training", base_training},
          {"training", training},
          {"augment", AugmentToJson(c.training)},
          {"mpl", {{"w", c.w}, {"sweep_w", c.sweep_w}}},
          {"ipl",
           {{"rounds", c.ipl_rounds},
            {"epochs_per_round", c.ipl_epochs_per_round}}},
          {"eval", {{"domain", c.eval_domain}}},
          {"seed", c.seed},
          {"deterministic", c.deterministic}};
}

ExperimentConfig ConfigFromJson(const json& j) {
  ExperimentConfig c = ExperimentConfig::Defaults();
  try {
    if (j.contains("mode")) c.mode = ParseMode(j.at("mode").get<std::string>());
    c.run_id = j.value("run_id", c.run_id);
    if (j.contains("paths")) {
      const json& p = j.at("paths");
      const auto path = [&p](const char* key, fs::path& dst) {
        if (p.contains(key)) dst = p.at(key).get<std::string>();
      };
      path("corpus", c.paths.corpus);
      path("output", c.paths.output);
      path("base_checkpoint", c.paths.base_checkpoint);
      path("checkpoint", c.paths.checkpoint);
      path("hyp_corpus", c.paths.hyp_corpus);
      path("base_summary", c.paths.base_summary);
      path("topline_summary", c.paths.topline_summary);
    }
    if (j.contains("corpus")) {
      json merged = CorpusSpecToJson(c.corpus);
      merged.merge_patch(j.at("corpus"));
      c.corpus = CorpusSpecFromJson(merged);
    }
    if (j.contains("arch")) {
      json merged = ArchToJson(c.arch);
      merged.merge_patch(j.at("arch"));
      c.arch = ArchFromJson(merged);
    }
    if (j.contains("base_training")) TrainingFromJson(j.at("base_training"), c.base_training);
    if (j.contains("training")) TrainingFromJson(j.at("training"), c.training);
    if (j.contains("augment")) {
      AugmentFromJson(j.at("augment"), c.training);
      AugmentFromJson(j.at("augment"), c.base_training);
    }
    if (j.contains("mpl")) {
      c.w = j.at("mpl").value("w", c.w);
      c.sweep_w = j.at("mpl").value("sweep_w", c.sweep_w);
    }
    if (j.contains("ipl")) {
      c.ipl_rounds = j.at("ipl").value("rounds", c.ipl_rounds);
      c.ipl_epochs_per_round =
          j.at("ipl").value("epochs_per_round", c.ipl_epochs_per_round);
    }
    if (j.contains("eval")) c.eval_domain = j.at("eval").value("domain", c.eval_domain);
    c.seed = j.value("seed", c.seed);
    c.deterministic = j.value("deterministic", c.deterministic);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid config: ") + e.what());
  }
  return c;
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidArgument("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw InvalidArgument("empty path segment in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (!child.is_object()) child = json::object();
    node = &child;
    start = dot + 1;
  }
}

std::string GitBlobHash(const Bytes& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("OpenSSL: cannot allocate digest context");
  const bool ok =
      EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
      EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
      EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
      EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("OpenSSL: SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

RunResult Run(const ExperimentConfig& config) {
  config.Validate();
  RunResult result;
  result.output_dir = config.paths.output;
  try {
    Runner runner(config);
    result.summary = runner.Execute();
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::create_directories(config.paths.output, ec);
    std::string type = "error";
    if (dynamic_cast<const InvalidArgument*>(&e)) type = "invalid_argument";
    else if (dynamic_cast<const NumericalError*>(&e)) type = "numerical_error";
    else if (dynamic_cast<const FormatError*>(&e)) type = "format_error";
    else if (dynamic_cast<const VersionError*>(&e)) type = "version_error";
    std::ofstream out(config.paths.output / "error.json", std::ios::trunc);
    out << json{{"error", {{"type", type}, {"message", e.what()}}},
                {"mode", ModeName(config.mode)},
                {"partial", true}}
               .dump(2)
        << '\n';
    throw;
  }
  return result;
}

std::vector<SweepRow> SweepW(const ExperimentConfig& config,
                             std::span<const double> w_values) {
  ExperimentConfig c = config;
  c.mode = Mode::kSweepW;
  c.Validate();
  Runner runner(c);
  runner.PrepareOutput();
  return runner.SweepRows(w_values);
}

}  // namespace mpl
