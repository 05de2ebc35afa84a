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

#include "mpl/augment.h"

#include <algorithm>
#include <cmath>

namespace mpl {

AugmentPolicy AugmentPolicy::Default(int feature_dim) {
  AugmentPolicy p;
  p.max_feat_width = std::max(1, feature_dim / 4);
  return p;
}

AugmentPolicy AugmentPolicy::Disabled() {
  AugmentPolicy p;
  p.n_time_masks = 0;
  p.n_feat_masks = 0;
  return p;
}

int AugmentPolicy::TimeWidthCap(long frames) const {
  if (max_time_fraction > 0.0)
    return static_cast<int>(std::floor(max_time_fraction * frames));
  return max_time_width;
}

void AugmentPolicy::Validate() const {
  if (n_time_masks < 0 || n_feat_masks < 0 || max_time_width < 0 ||
      max_feat_width < 0 || max_time_fraction < 0.0)
    throw InvalidArgument("augment policy counts and widths must be >= 0");
}

namespace {

// Draws [start, start + width) inside [0, extent).
std::pair<long, long> DrawMask(long extent, int cap, std::mt19937_64& rng) {
  const long max_width = std::min<long>(cap, extent);
  const long width = std::uniform_int_distribution<long>(0, max_width)(rng);
  const long start =
      std::uniform_int_distribution<long>(0, extent - width)(rng);
  return {start, width};
}

}  // namespace

Matrix ApplyAugment(const Matrix& features, const AugmentPolicy& policy,
                    std::mt19937_64& rng) {
  policy.Validate();
  Matrix out = features;
  const long T = features.rows(), D = features.cols();
  if (T == 0 || D == 0) return out;
  const int time_cap = policy.TimeWidthCap(T);
  for (int i = 0; i < policy.n_time_masks; ++i) {
    auto [start, width] = DrawMask(T, time_cap, rng);
    out.middleRows(start, width).setConstant(policy.fill_value);
  }
  for (int i = 0; i < policy.n_feat_masks; ++i) {
    auto [start, width] = DrawMask(D, policy.max_feat_width, rng);
    out.middleCols(start, width).setConstant(policy.fill_value);
  }
  return out;
}

}  // namespace mpl
