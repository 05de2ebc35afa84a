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

// Log-space connectionist temporal classification: sequence probability,
// loss and logit gradient via forward-backward, greedy best-path decoding,
// and an exhaustive path-enumeration reference.
//
// A LogPosteriorGrid is a T x (V+1) matrix of per-frame log-probabilities.
// Column V is the blank. Every row must log-sum-exp to 0.

#ifndef MPL_CTC_H_
#define MPL_CTC_H_

#include <cstdint>
#include <limits>

#include "mpl/types.h"

namespace mpl {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; kLogZero is the identity.
double LogAdd(double a, double b);

// Throws InvalidArgument unless grid has at least two columns, every entry is
// finite and <= 1e-9, and every row log-sum-exps to 0 within 1e-9.
void ValidateGrid(const Matrix& grid);

// Throws InvalidArgument unless every token is in [0, vocab_size).
void ValidateLabel(const TokenSequence& label, int vocab_size);

// Smallest T for which label has at least one CTC path: one frame per token
// plus a separating blank between each pair of equal adjacent tokens.
int MinFramesForLabel(const TokenSequence& label);

// Collapse a frame-level path: merge repeats, then drop blanks.
TokenSequence CollapsePath(const std::vector<int>& path, int blank);

// log P(label | grid), summed over every path that collapses to label.
// Returns kLogZero when no such path fits in grid.rows() frames.
double CtcLogProb(const Matrix& grid, const TokenSequence& label);

enum class CtcStatus { kOk, kInfeasible };

struct CtcLossResult {
  CtcStatus status = CtcStatus::kOk;
  double loss = 0.0;  // -log P(label | grid)
  Matrix grad;        // d loss / d logits, where grid = log_softmax(logits)
  bool ok() const { return status == CtcStatus::kOk; }
};

// Forward-backward loss and gradient. An infeasible label yields
// status == kInfeasible with empty grad; a non-finite result throws
// NumericalError.
CtcLossResult CtcLossAndGrad(const Matrix& grid, const TokenSequence& label);

// Per-frame argmax then collapse. Ties go to the lowest index; the blank
// (last column) loses every tie.
TokenSequence BestPathDecode(const Matrix& grid);

inline constexpr std::uint64_t kBruteForceMaxPaths = 10'000'000;

// Enumerates all (V+1)^T paths. Refuses (InvalidArgument) above
// kBruteForceMaxPaths. Reference implementation for tests.
double BruteForceLogProb(const Matrix& grid, const TokenSequence& label);

}  // namespace mpl

#endif  // MPL_CTC_H_
