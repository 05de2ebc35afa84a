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

// Synthetic sequence-transduction corpora. Each token id owns a fixed
// D-dimensional prototype; an utterance is a token sequence in which every
// token occupies r in [min_frames, max_frames] frames of its prototype plus
// Gaussian noise. Unlabeled and out-of-domain data additionally pass through
// a list of domain shifts.

#ifndef MPL_DATA_H_
#define MPL_DATA_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mpl/binary_io.h"
#include "mpl/types.h"

namespace mpl {

struct DomainShift {
  enum class Kind { kNone, kLinearTransform, kNoiseScale, kPrototypeJitter };
  Kind kind = Kind::kNone;
  // kLinearTransform: rotation angle (radians) applied in each of D/2 random
  //   coordinate planes.
  // kNoiseScale: multiplier on noise_std.
  // kPrototypeJitter: std of a fixed Gaussian offset added to each prototype.
  double magnitude = 0.0;

  void Validate() const;
  bool operator==(const DomainShift&) const = default;
};

std::string ShiftKindName(DomainShift::Kind kind);
DomainShift::Kind ParseShiftKind(const std::string& name);

struct CorpusSpec {
  int vocab_size = 8;
  int feature_dim = 16;
  int n_labeled = 200;
  int n_unlabeled = 2000;
  int n_valid = 200;  // per domain
  int n_test = 200;   // per domain
  int min_len = 3;
  int max_len = 10;
  int min_frames = 2;  // per token
  int max_frames = 5;
  double noise_std = 0.3;
  double prototype_std = 1.0;
  bool allow_adjacent_repeats = false;
  std::vector<DomainShift> shifts;  // empty: unlabeled data is in-domain
  std::uint64_t seed = 1;

  bool Shifted() const;
  void Validate() const;
  bool operator==(const CorpusSpec&) const = default;
};

struct Utterance {
  Matrix features;  // T x D
  TokenSequence label;
  bool operator==(const Utterance& o) const {
    return label == o.label && features.rows() == o.features.rows() &&
           features.cols() == o.features.cols() && features == o.features;
  }
};

enum class SplitTag : std::uint8_t {
  kLabeled = 0,
  kUnlabeled = 1,
  kValidIn = 2,
  kTestIn = 3,
  kValidOut = 4,
  kTestOut = 5,
};

struct Corpus {
  CorpusSpec spec;
  std::vector<Utterance> labeled;
  // Training code only ever receives unlabeled_features. The references are
  // kept for evaluation and for topline training.
  std::vector<Matrix> unlabeled_features;
  std::vector<TokenSequence> unlabeled_references;
  std::vector<Utterance> valid_in, test_in;
  std::vector<Utterance> valid_out, test_out;  // empty unless spec.Shifted()

  // Utterances of the unlabeled split with their hidden references attached.
  std::vector<Utterance> RevealUnlabeled() const;
  bool operator==(const Corpus& o) const;
};

// Prototype matrices (V x D) for the in-domain and shifted domains.
struct Prototypes {
  Matrix in_domain;
  Matrix shifted;
};
Prototypes MakePrototypes(const CorpusSpec& spec);

// Deterministic in spec.seed; utterance i of a split draws from its own
// seed stream, so any utterance can be regenerated independently.
Corpus GenerateCorpus(const CorpusSpec& spec);

inline constexpr char kCorpusMagic[] = "MPLCORP1";

Bytes EncodeCorpus(const Corpus& corpus);
Corpus DecodeCorpus(const Bytes& bytes);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus LoadCorpus(const std::filesystem::path& path);

}  // namespace mpl

#endif  // MPL_DATA_H_
