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

// A context-window MLP acoustic model. Frame t sees the spliced features of
// frames [t-c, t+c] (zero outside the utterance), passes them through
// n_hidden tanh layers of width H, then a linear layer and log-softmax over
// V+1 outputs (blank last).
//
// Parameter layout in ParamVector::values, in order, for each layer
// (hidden layers first, output layer last):
//   W  in x out, row-major (W[i * out + o])
//   b  out
// where the first layer has in = (2c+1)*D and every hidden layer has out = H.

#ifndef MPL_MODEL_H_
#define MPL_MODEL_H_

#include <cstdint>
#include <span>

#include "mpl/ctc.h"
#include "mpl/types.h"

namespace mpl {

struct Architecture {
  int input_dim = 16;      // D
  int context = 2;         // c, frames on each side
  int hidden = 64;         // H
  int n_hidden = 1;
  int vocab_size = 8;      // V, excluding blank

  int SplicedDim() const { return (2 * context + 1) * input_dim; }
  int OutputDim() const { return vocab_size + 1; }
  std::int64_t ParamCount() const;
  void Validate() const;
  bool operator==(const Architecture&) const = default;
};

struct ParamVector {
  Architecture arch;
  Vector values;

  static ParamVector Zeros(const Architecture& arch);
  void Validate() const;
  bool SameShape(const ParamVector& other) const {
    return arch == other.arch && values.size() == other.values.size();
  }
};

// Fan-in scaled Gaussian weights, zero biases. Deterministic in seed.
ParamVector InitParams(const Architecture& arch, std::uint64_t seed);

// Returns the T x (V+1) log-posterior grid.
Matrix Forward(const ParamVector& params, const Matrix& features);

struct LossAndGradient {
  CtcStatus status = CtcStatus::kOk;
  double loss = 0.0;
  Vector grad;  // same length as params.values; empty when infeasible
  bool ok() const { return status == CtcStatus::kOk; }
};

// -log P(label | features) and its exact gradient w.r.t. params.
LossAndGradient ComputeLossAndGradient(const ParamVector& params,
                                       const Matrix& features,
                                       const TokenSequence& label);

struct Example {
  const Matrix* features;
  const TokenSequence* label;
};

struct BatchLossAndGradient {
  double loss = 0.0;     // summed over feasible examples
  Vector grad;           // summed over feasible examples
  int used = 0;
  int infeasible = 0;
};

// Sums per-example losses and gradients in example order, so the result does
// not depend on num_threads. Infeasible examples are counted and skipped.
BatchLossAndGradient ComputeBatchLossAndGradient(const ParamVector& params,
                                                 std::span<const Example> batch,
                                                 int num_threads = 1);

}  // namespace mpl

#endif  // MPL_MODEL_H_
