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

#ifndef MPL_METRICS_H_
#define MPL_METRICS_H_

#include <span>
#include <utility>

#include "mpl/types.h"

namespace mpl {

struct ErrorCounts {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long ref_tokens = 0;

  long Edits() const { return substitutions + insertions + deletions; }
  // Percent; throws InvalidArgument when ref_tokens == 0.
  double RatePercent() const;
  ErrorCounts& operator+=(const ErrorCounts& o);
  bool operator==(const ErrorCounts&) const = default;
};

// Minimum-edit Levenshtein alignment of hyp against ref. Among equal-cost
// alignments the backtrace prefers match/substitution, then deletion, then
// insertion.
ErrorCounts EditDistance(const TokenSequence& ref, const TokenSequence& hyp);

using RefHypPair = std::pair<TokenSequence, TokenSequence>;

// 100 * sum(S+I+D) / sum(ref_tokens), pooled over the corpus.
double CorpusErrorRate(std::span<const RefHypPair> pairs);
ErrorCounts CorpusErrorCounts(std::span<const RefHypPair> pairs);

// Recovery rate: percent of the base-to-topline error gap closed by model.
double WerRecoveryRate(double base_wer, double model_wer, double topline_wer);

}  // namespace mpl

#endif  // MPL_METRICS_H_
