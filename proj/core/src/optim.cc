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

#include "mpl/optim.h"

#include <algorithm>
#include <cmath>

namespace mpl {

AdamState AdamState::ForParams(const ParamVector& params, AdamConfig config) {
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 &&
        config.beta2 < 1.0))
    throw InvalidArgument("Adam betas must lie in [0, 1)");
  AdamState state;
  state.config = config;
  state.m = Vector::Zero(params.values.size());
  state.v = Vector::Zero(params.values.size());
  return state;
}

void AdamStep(AdamState& state, ParamVector& params, const Vector& grad) {
  if (grad.size() != params.values.size() || state.m.size() != grad.size())
    throw InvalidArgument("Adam: gradient, moments and params differ in length");
  if (!grad.allFinite()) throw NumericalError("Adam: non-finite gradient");
  const AdamConfig& c = state.config;
  ++state.step;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * grad;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * grad.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  params.values.array() -= c.lr * (state.m.array() / bc1) /
                           ((state.v.array() / bc2).sqrt() + c.eps);
}

double NoamLr(long step, long warmup, double factor, int dim) {
  if (step < 1 || warmup < 1 || dim < 1)
    throw InvalidArgument("Noam schedule needs step, warmup, dim >= 1");
  const double s = static_cast<double>(step);
  return factor / std::sqrt(static_cast<double>(dim)) *
         std::min(1.0 / std::sqrt(s), s * std::pow(static_cast<double>(warmup), -1.5));
}

double NoamFactorForPeak(double peak_lr, long warmup, int dim) {
  return peak_lr / NoamLr(warmup, warmup, 1.0, dim);
}

double ClipGradNorm(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

ParamVector AverageCheckpoints(std::span<const ParamVector> checkpoints) {
  if (checkpoints.empty())
    throw InvalidArgument("cannot average an empty checkpoint list");
  ParamVector mean = ParamVector::Zeros(checkpoints.front().arch);
  for (const ParamVector& c : checkpoints) {
    if (!c.SameShape(mean))
      throw InvalidArgument("checkpoint architectures differ");
    mean.values += c.values;
  }
  mean.values /= static_cast<double>(checkpoints.size());
  return mean;
}

}  // namespace mpl
