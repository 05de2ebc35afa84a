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

#ifndef MPL_OPTIM_H_
#define MPL_OPTIM_H_

#include <span>

#include "mpl/model.h"
#include "mpl/types.h"

namespace mpl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Vector m;
  Vector v;
  long step = 0;

  static AdamState ForParams(const ParamVector& params, AdamConfig config);
};

// One bias-corrected Adam update at learning rate state.config.lr.
// Throws NumericalError if grad has a non-finite entry; state and params are
// left untouched in that case.
void AdamStep(AdamState& state, ParamVector& params, const Vector& grad);

// factor * dim^-0.5 * min(step^-0.5, step * warmup^-1.5), step >= 1.
double NoamLr(long step, long warmup, double factor, int dim);

// Noam factor whose peak (at step == warmup) equals peak_lr.
double NoamFactorForPeak(double peak_lr, long warmup, int dim);

// Rescales grad in place so its L2 norm is at most max_norm (<= 0 disables).
// Returns the norm before clipping.
double ClipGradNorm(Vector& grad, double max_norm);

// Elementwise mean. Requires a non-empty list of same-architecture vectors.
ParamVector AverageCheckpoints(std::span<const ParamVector> checkpoints);

}  // namespace mpl

#endif  // MPL_OPTIM_H_
