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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Experiment artifacts are kept under
// ./acceptance_work for inspection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpl/binary_io.h"
#include "mpl/checkpoint.h"
#include "mpl/ctc.h"
#include "mpl/data.h"
#include "mpl/harness.h"
#include "mpl/metrics.h"
#include "mpl/model.h"
#include "mpl/mpl.h"
#include "test_util.h"

namespace mpl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kCtcOracleTol = 1e-9;
constexpr double kCtcOracleSeconds = 30.0;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr double kFdStep = 1e-5;
constexpr double kEmaClosedFormTol = 1e-10;
constexpr double kEmaRetentionTol = 1e-12;
constexpr double kAlphaTol = 1e-5;
constexpr double kWrrTol = 0.8;
constexpr double kInDomainSeconds = 20.0 * 60.0;
constexpr int kSeeds[] = {1, 2, 3};

class Clock {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double Median(std::vector<double> v) {
  if (v.empty()) throw Error("no results to summarize");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::string List(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + Fmt("%.2f", v[i]);
  return s + "]";
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
}

// Criterion 1.
Outcome CtcOracle() {
  Clock clock;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int frames = 1 + static_cast<int>(rng() % 6);
    const int vocab = 1 + static_cast<int>(rng() % 3);
    const int length = static_cast<int>(rng() % 4);
    const Matrix grid =
        testing::LogSoftmaxRows(testing::RandomLogits(frames, vocab + 1, rng));
    const TokenSequence label = testing::RandomLabel(length, vocab, rng);
    const double lp = CtcLogProb(grid, label);
    const double brute = BruteForceLogProb(grid, label);
    const double oracle = std::log(testing::EnumeratedCtcProb(grid, label));
    if (std::isinf(oracle)) {
      ++infeasible;
      if (!(std::isinf(lp) && std::isinf(brute))) return {false, "infeasible mismatch"};
      continue;
    }
    worst = std::max({worst, std::abs(lp - brute), std::abs(lp - oracle)});
  }
  const double secs = clock.Seconds();
  return {worst < kCtcOracleTol && secs < kCtcOracleSeconds,
          Fmt("max |diff| %.2e (< %.0e) over 200 instances (%d infeasible), %.2f s "
              "(< %.0f s)",
              worst, kCtcOracleTol, infeasible, secs, kCtcOracleSeconds)};
}

double SequenceLoss(const ParamVector& p, const Matrix& x, const TokenSequence& y) {
  return -CtcLogProb(Forward(p, x), y);
}

// Criterion 2.
Outcome GradientCheck() {
  Clock clock;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Architecture a;
    a.input_dim = 1 + static_cast<int>(rng() % 4);
    a.context = static_cast<int>(rng() % 3);
    a.hidden = 1 + static_cast<int>(rng() % 8);
    a.n_hidden = 1 + static_cast<int>(rng() % 2);
    a.vocab_size = 1 + static_cast<int>(rng() % 4);
    const ParamVector p = InitParams(a, 1000 + trial);
    const int frames = 3 + static_cast<int>(rng() % 6);
    Matrix x(frames, a.input_dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    TokenSequence y =
        testing::RandomLabel(1 + static_cast<int>(rng() % 3), a.vocab_size, rng);
    if (MinFramesForLabel(y) > frames) y.resize(1);
    const LossAndGradient r = ComputeLossAndGradient(p, x, y);
    if (!r.ok()) return {false, Fmt("trial %d not feasible", trial)};
    Vector fd(p.values.size());
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      ParamVector plus = p, minus = p;
      plus.values[i] += kFdStep;
      minus.values[i] -= kFdStep;
      fd[i] = (SequenceLoss(plus, x, y) - SequenceLoss(minus, x, y)) / (2 * kFdStep);
    }
    worst = std::max(worst, testing::RelativeError(r.grad, fd));
  }
  const double secs = clock.Seconds();
  return {worst < kGradRelTol && secs < kGradSeconds,
          Fmt("max relative error %.2e (< %.0e) over 100 models, %.2f s (< %.0f s)",
              worst, kGradRelTol, secs, kGradSeconds)};
}

// Criterion 3.
Outcome EmaAlgebra() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Architecture a;
  a.input_dim = 3;
  a.context = 1;
  a.hidden = 4;
  a.vocab_size = 3;
  const auto random_params = [&] {
    ParamVector p = ParamVector::Zeros(a);
    for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = normal(rng);
    return p;
  };
  const int k_steps = 1000;
  const double alpha = DeriveAlpha(0.5, k_steps);
  const ParamVector phi0 = random_params();
  std::vector<ParamVector> online;
  for (int k = 0; k < k_steps; ++k) online.push_back(random_params());
  ParamVector phi = phi0;
  for (const ParamVector& x : online) EmaUpdateInPlace(phi, x, alpha);
  double closed_err = 0.0;
  for (Eigen::Index i = 0; i < phi0.values.size(); ++i) {
    long double closed =
        std::pow(static_cast<long double>(alpha), k_steps) * phi0.values[i];
    for (int k = 1; k <= k_steps; ++k)
      closed += (1.0L - alpha) *
                std::pow(static_cast<long double>(alpha), k_steps - k) *
                online[k - 1].values[i];
    closed_err =
        std::max(closed_err, std::abs(phi.values[i] - static_cast<double>(closed)));
  }

  const ParamVector frozen = random_params();
  ParamVector psi = phi0;
  double retention_err = 0.0;
  for (int k = 1; k <= k_steps; ++k) {
    EmaUpdateInPlace(psi, frozen, alpha);
    const Vector expected = std::pow(alpha, k) * (phi0.values - frozen.values);
    retention_err = std::max(
        retention_err,
        ((psi.values - frozen.values) - expected).cwiseAbs().maxCoeff());
  }
  const double retained = std::pow(alpha, k_steps);
  return {closed_err < kEmaClosedFormTol && retention_err < kEmaRetentionTol &&
              std::abs(retained - 0.5) < 1e-12,
          Fmt("closed form max err %.2e (< %.0e), frozen-online retention err "
              "%.2e (< %.0e), alpha^K = %.15f",
              closed_err, kEmaClosedFormTol, retention_err, kEmaRetentionTol,
              retained)};
}

// Criterion 4.
Outcome AlphaDerivation() {
  const struct {
    long k;
    double published;
  } cases[] = {{3013, 0.99977}, {6301, 0.99989}, {4077, 0.99983}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const double alpha = DeriveAlpha(0.5, c.k);
    ok = ok && std::abs(alpha - c.published) <= kAlphaTol;
    detail += Fmt("K=%ld -> %.6f (want %.5f)  ", c.k, alpha, c.published);
  }
  return {ok, detail + Fmt("tol %.0e", kAlphaTol)};
}

// Criterion 5.
Outcome WrrArithmetic() {
  const double a = WerRecoveryRate(13.5, 9.6, 7.3);
  const double b = WerRecoveryRate(32.4, 22.6, 20.3);
  return {std::abs(a - 63.6) <= kWrrTol && std::abs(b - 81.2) <= kWrrTol,
          Fmt("wrr(13.5, 9.6, 7.3) = %.2f (want 63.6), wrr(32.4, 22.6, 20.3) = "
              "%.2f (want 81.2), tol %.1f",
              a, b, kWrrTol)};
}

// Runs harness experiments under one working directory.
class Lab {
 public:
  explicit Lab(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }

  json Run(ExperimentConfig c, const std::string& out) {
    c.paths.output = root_ / out;
    c.deterministic = true;
    if (c.run_id.empty()) c.run_id = out;
    return mpl::Run(c).summary;
  }

  fs::path Corpus(const CorpusSpec& spec, const std::string& name) {
    ExperimentConfig c = ExperimentConfig::Defaults();
    c.mode = Mode::kGenData;
    c.corpus = spec;
    c.paths.corpus = root_ / (name + ".mplcorp");
    Run(c, "gen-" + name);
    return c.paths.corpus;
  }

 private:
  fs::path root_;
};

double TestTer(const json& summary) {
  return summary.at("test_ter_percent").get<double>();
}

ExperimentConfig Config(Mode mode, const fs::path& corpus, const CorpusSpec& spec,
                        int seed) {
  ExperimentConfig c = ExperimentConfig::Defaults();
  c.mode = mode;
  c.corpus = spec;
  c.paths.corpus = corpus;
  c.seed = static_cast<std::uint64_t>(seed);
  return c;
}

struct Pipeline {
  std::vector<double> base, pl, mpl, topline, wrr;
};

// Base, topline, PL and MPL on one corpus for every seed. With augment=false
// every stage trains on clean features.
Pipeline RunPipeline(Lab& lab, const fs::path& corpus, const CorpusSpec& spec,
                     const std::string& tag, bool augment, bool with_pl) {
  Pipeline p;
  for (int seed : kSeeds) {
    const std::string dir = tag + "/s" + std::to_string(seed) + "/";
    ExperimentConfig c = Config(Mode::kTrainBase, corpus, spec, seed);
    c.base_training.augment = augment;
    c.training.augment = augment;
    p.base.push_back(TestTer(lab.Run(c, dir + "base")));
    c.paths.base_checkpoint = lab.root() / (dir + "base") / "base.ckpt";

    c.mode = Mode::kTrainTopline;
    p.topline.push_back(TestTer(lab.Run(c, dir + "topline")));

    if (with_pl) {
      c.mode = Mode::kTrainPl;
      p.pl.push_back(TestTer(lab.Run(c, dir + "pl")));
    }

    c.mode = Mode::kTrainMpl;
    c.paths.base_summary = lab.root() / (dir + "base") / "summary.json";
    c.paths.topline_summary = lab.root() / (dir + "topline") / "summary.json";
    const json mpl = lab.Run(c, dir + "mpl");
    p.mpl.push_back(TestTer(mpl));
    p.wrr.push_back(mpl.at("wrr_percent").get<double>());
  }
  return p;
}

struct Shifted {
  std::vector<double> base, pl, mpl, ipl_final;
  std::vector<std::vector<double>> ipl_rounds;  // [round][seed]
  std::vector<std::vector<double>> sweep_dev;   // [w][seed]
  std::vector<std::vector<double>> sweep_empty;
  std::vector<double> w_values;
};

Shifted RunShifted(Lab& lab, const fs::path& corpus, const CorpusSpec& spec) {
  Shifted s;
  const ExperimentConfig defaults = ExperimentConfig::Defaults();
  s.w_values = defaults.sweep_w;
  s.ipl_rounds.assign(defaults.ipl_rounds, {});
  s.sweep_dev.assign(s.w_values.size(), {});
  s.sweep_empty.assign(s.w_values.size(), {});
  for (int seed : kSeeds) {
    const std::string dir = "shifted/s" + std::to_string(seed) + "/";
    ExperimentConfig c = Config(Mode::kTrainBase, corpus, spec, seed);
    s.base.push_back(TestTer(lab.Run(c, dir + "base")));
    c.paths.base_checkpoint = lab.root() / (dir + "base") / "base.ckpt";

    c.mode = Mode::kTrainPl;
    s.pl.push_back(TestTer(lab.Run(c, dir + "pl")));
    c.mode = Mode::kTrainMpl;
    s.mpl.push_back(TestTer(lab.Run(c, dir + "mpl")));

    c.mode = Mode::kTrainIpl;
    const json ipl = lab.Run(c, dir + "ipl");
    const json& rounds = ipl.at("rounds");
    for (size_t k = 0; k < rounds.size(); ++k)
      s.ipl_rounds[k].push_back(rounds[k].at("test_ter_percent").get<double>());
    s.ipl_final.push_back(TestTer(ipl));

    c.mode = Mode::kSweepW;
    const json sweep = lab.Run(c, dir + "sweep");
    const json& table = sweep.at("sweep");
    for (size_t i = 0; i < table.size(); ++i) {
      s.sweep_dev[i].push_back(table[i].at("online_dev_ter").get<double>());
      s.sweep_empty[i].push_back(table[i].at("max_empty_pl_fraction").get<double>());
    }
  }
  return s;
}

// Criterion 6.
Outcome InDomainOrdering(const Pipeline& p, double seconds) {
  const double base = Median(p.base), pl = Median(p.pl), mpl = Median(p.mpl),
               top = Median(p.topline);
  return {mpl < pl && pl < base && mpl >= top && seconds < kInDomainSeconds,
          Fmt("median TER base %.2f > PL %.2f > MPL %.2f >= topline %.2f "
              "(base %s PL %s MPL %s topline %s), %.0f s (< %.0f s)",
              base, pl, mpl, top, List(p.base).c_str(), List(p.pl).c_str(),
              List(p.mpl).c_str(), List(p.topline).c_str(), seconds,
              kInDomainSeconds)};
}

// Criterion 7.
Outcome OutDomainOrdering(const Shifted& s) {
  const double base = Median(s.base), pl = Median(s.pl), mpl = Median(s.mpl);
  return {base - mpl > base - pl,
          Fmt("median TER base %.2f, PL %.2f, MPL %.2f: MPL gain %.2f vs PL gain "
              "%.2f (base %s PL %s MPL %s)",
              base, pl, mpl, base - mpl, base - pl, List(s.base).c_str(),
              List(s.pl).c_str(), List(s.mpl).c_str())};
}

// Criterion 8.
Outcome SweepShape(const Shifted& s) {
  std::vector<double> dev, empty;
  for (size_t i = 0; i < s.w_values.size(); ++i) {
    dev.push_back(Median(s.sweep_dev[i]));
    empty.push_back(Median(s.sweep_empty[i]));
  }
  const size_t best = static_cast<size_t>(
      std::min_element(dev.begin(), dev.end()) - dev.begin());
  const auto index_of = [&](double w) -> size_t {
    for (size_t i = 0; i < s.w_values.size(); ++i)
      if (s.w_values[i] == w) return i;
    throw InvalidArgument("w grid lacks a required value");
  };
  const size_t w0 = index_of(0.0), w_half = index_of(0.5), w1 = index_of(1.0);
  const bool interior = best != w0 && best != w1;
  const bool collapse = empty[w0] > empty[w_half];
  return {interior && collapse,
          Fmt("w %s median dev TER %s best at w=%.2f; worst-epoch empty "
              "pseudo-label fraction w=0: %.4f vs w=0.5: %.4f",
              List(s.w_values).c_str(), List(dev).c_str(), s.w_values[best],
              empty[w0], empty[w_half])};
}

// Criterion 9.
Outcome IplComparison(const Shifted& s) {
  std::vector<double> rounds;
  for (const auto& r : s.ipl_rounds) rounds.push_back(Median(r));
  bool monotone = rounds.size() >= 2;
  for (size_t k = 1; k < rounds.size(); ++k)
    monotone = monotone && rounds[k] < rounds[k - 1];
  const double mpl = Median(s.mpl), ipl = Median(s.ipl_final);
  return {monotone && mpl <= ipl,
          Fmt("IPL median TER per round %s (strictly decreasing: %s); MPL %.2f "
              "<= IPL %.2f",
              List(rounds).c_str(), monotone ? "yes" : "no", mpl, ipl)};
}

// Criterion 10.
Outcome AugmentAblation(const Pipeline& with_aug, const Pipeline& without) {
  const double a = Median(with_aug.wrr), b = Median(without.wrr);
  return {b < a, Fmt("median recovery with augmentation %.1f%% %s, without %.1f%% "
                     "%s (no-aug base %s topline %s MPL %s)",
                     a, List(with_aug.wrr).c_str(), b, List(without.wrr).c_str(),
                     List(without.base).c_str(), List(without.topline).c_str(),
                     List(without.mpl).c_str())};
}

// Criterion 11.
Outcome Determinism(Lab& lab, const fs::path& corpus, const CorpusSpec& spec) {
  const fs::path base_ckpt = lab.root() / "in/s1/base/base.ckpt";
  std::vector<std::string> checked;
  bool ok = true;
  const auto twice = [&](ExperimentConfig c, const std::string& name) {
    c.run_id = name;
    const fs::path summary = lab.root() / "determinism" / name / "summary.json";
    lab.Run(c, "determinism/" + name);
    const Bytes first = ReadFileBytes(summary);
    lab.Run(c, "determinism/" + name);
    const bool same = ReadFileBytes(summary) == first;
    ok = ok && same;
    checked.push_back(name + (same ? " identical" : " DIFFERS"));
  };
  ExperimentConfig c = Config(Mode::kGenData, corpus, spec, 5);
  c.paths.corpus.clear();
  twice(c, "gen-data");
  c = Config(Mode::kTrainBase, corpus, spec, 5);
  c.base_training.epochs = 3;
  c.base_training.num_threads = 4;
  twice(c, "train-base");
  c.paths.base_checkpoint = base_ckpt;
  c.training.epochs = 2;
  c.training.num_threads = 4;
  for (Mode m : {Mode::kTrainMpl, Mode::kTrainPl, Mode::kTrainIpl}) {
    c.mode = m;
    c.ipl_epochs_per_round = 1;
    twice(c, ModeName(m));
  }
  std::string detail;
  for (const std::string& s : checked) detail += s + "; ";
  return {ok, detail + "summary.json compared byte for byte"};
}

template <typename Decode>
bool CorruptionIsStructured(const Bytes& bytes, Decode decode, std::string& log) {
  bool ok = true;
  Bytes magic = bytes;
  magic[0] ^= 0x20;
  try {
    decode(magic);
    ok = false;
  } catch (const VersionError&) {
  } catch (const Error&) {
    ok = false;
  }
  int cuts = 0;
  for (size_t cut = 0; cut < bytes.size(); cut += std::max<size_t>(1, bytes.size() / 37)) {
    const Bytes truncated(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    try {
      decode(truncated);
      ok = false;
    } catch (const FormatError& e) {
      ok = ok && e.offset() <= cut;
    } catch (const Error&) {
      ok = ok && cut < 8;
    }
    ++cuts;
  }
  Bytes trailing = bytes;
  trailing.push_back(0);
  try {
    decode(trailing);
    ok = false;
  } catch (const FormatError&) {
  }
  log += Fmt("%d truncations, bad magic, trailing byte", cuts);
  return ok;
}

// Criterion 12.
Outcome Serialization(Lab& lab, const fs::path& in_corpus, const fs::path& out_corpus) {
  bool ok = true;
  std::string detail;
  for (const fs::path& path : {in_corpus, out_corpus}) {
    const Bytes file = ReadFileBytes(path);
    const mpl::Corpus corpus = LoadCorpus(path);
    const Bytes again = EncodeCorpus(corpus);
    ok = ok && again == file && DecodeCorpus(again) == corpus;
  }
  detail += "corpora re-encode bitwise; ";
  const fs::path ckpt_path = lab.root() / "in/s1/mpl/online.ckpt";
  const Bytes ckpt_file = ReadFileBytes(ckpt_path);
  const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  const fs::path copy = lab.root() / "roundtrip.ckpt";
  SaveCheckpoint(copy, ckpt);
  const Checkpoint back = LoadCheckpoint(copy);
  ok = ok && ReadFileBytes(copy) == ckpt_file && back.step == ckpt.step &&
       std::memcmp(back.params.values.data(), ckpt.params.values.data(),
                   sizeof(double) * static_cast<size_t>(ckpt.params.values.size())) == 0;
  detail += "checkpoint re-encodes bitwise; corpus corruption: ";

  const Bytes small_corpus = EncodeCorpus(GenerateCorpus([] {
    CorpusSpec s = ShiftedCorpusSpec();
    s.n_labeled = 3;
    s.n_unlabeled = 3;
    s.n_valid = 2;
    s.n_test = 2;
    return s;
  }()));
  ok = CorruptionIsStructured(small_corpus, DecodeCorpus, detail) && ok;
  detail += "; checkpoint corruption: ";
  ok = CorruptionIsStructured(ckpt_file, DecodeCheckpoint, detail) && ok;
  Bytes nan_ckpt = ckpt_file;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(nan_ckpt.data() + nan_ckpt.size() - sizeof(double), &nan, sizeof(double));
  try {
    DecodeCheckpoint(nan_ckpt);
    ok = false;
  } catch (const FormatError&) {
  }
  detail += ", non-finite value";
  return {ok, detail};
}

int Main() {
  Report(1, "CTC oracle equivalence", CtcOracle);
  Report(2, "gradient check", GradientCheck);
  Report(3, "EMA algebra", EmaAlgebra);
  Report(4, "alpha derivation", AlphaDerivation);
  Report(5, "WRR arithmetic", WrrArithmetic);

  Lab lab(fs::current_path() / "acceptance_work");
  fs::remove_all(lab.root());
  const CorpusSpec in_spec = InDomainCorpusSpec();
  const CorpusSpec out_spec = ShiftedCorpusSpec();

  Pipeline in_aug, in_plain;
  Shifted shifted;
  fs::path in_corpus, out_corpus;
  Report(6, "in-domain ordering", [&] {
    Clock clock;
    in_corpus = lab.Corpus(in_spec, "in_domain");
    in_aug = RunPipeline(lab, in_corpus, in_spec, "in", true, true);
    return InDomainOrdering(in_aug, clock.Seconds());
  });
  Report(7, "out-domain ordering", [&] {
    out_corpus = lab.Corpus(out_spec, "shifted");
    shifted = RunShifted(lab, out_corpus, out_spec);
    return OutDomainOrdering(shifted);
  });
  Report(8, "w-sweep shape", [&] { return SweepShape(shifted); });
  Report(9, "IPL comparison", [&] { return IplComparison(shifted); });

  Report(10, "augmentation ablation", [&] {
    in_plain = RunPipeline(lab, in_corpus, in_spec, "in_noaug", false, false);
    return AugmentAblation(in_aug, in_plain);
  });
  Report(11, "determinism", [&] { return Determinism(lab, in_corpus, in_spec); });
  Report(12, "serialization", [&] { return Serialization(lab, in_corpus, out_corpus); });

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

}  // namespace
}  // namespace mpl

int main() { return mpl::Main(); }
