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

#include "mpl/metrics.h"

#include <algorithm>
#include <vector>

namespace mpl {

double ErrorCounts::RatePercent() const {
  if (ref_tokens <= 0)
    throw InvalidArgument("error rate undefined with zero reference tokens");
  return 100.0 * static_cast<double>(Edits()) / static_cast<double>(ref_tokens);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  ref_tokens += o.ref_tokens;
  return *this;
}

ErrorCounts EditDistance(const TokenSequence& ref, const TokenSequence& hyp) {
  const size_t R = ref.size(), H = hyp.size();
  // cost[i][j]: edits aligning ref[0, i) with hyp[0, j).
  std::vector<std::vector<long>> cost(R + 1, std::vector<long>(H + 1, 0));
  for (size_t i = 0; i <= R; ++i) cost[i][0] = static_cast<long>(i);
  for (size_t j = 0; j <= H; ++j) cost[0][j] = static_cast<long>(j);
  for (size_t i = 1; i <= R; ++i) {
    for (size_t j = 1; j <= H; ++j) {
      const long diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({diag, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  }

  ErrorCounts counts;
  counts.ref_tokens = static_cast<long>(R);
  size_t i = R, j = H;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = ref[i - 1] == hyp[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (match ? 0 : 1)) {
        if (!match) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

ErrorCounts CorpusErrorCounts(std::span<const RefHypPair> pairs) {
  ErrorCounts total;
  for (const auto& [ref, hyp] : pairs) total += EditDistance(ref, hyp);
  return total;
}

double CorpusErrorRate(std::span<const RefHypPair> pairs) {
  return CorpusErrorCounts(pairs).RatePercent();
}

double WerRecoveryRate(double base_wer, double model_wer, double topline_wer) {
  if (!(base_wer > topline_wer))
    throw InvalidArgument("recovery rate needs base error above topline error");
  return 100.0 * (base_wer - model_wer) / (base_wer - topline_wer);
}

}  // namespace mpl
