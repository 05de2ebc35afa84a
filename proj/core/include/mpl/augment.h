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

// SpecAugment-style masking of a T x D feature matrix: time masks blank out
// runs of whole frames, feature masks blank out runs of feature bins.

#ifndef MPL_AUGMENT_H_
#define MPL_AUGMENT_H_

#include <random>

#include "mpl/types.h"

namespace mpl {

struct AugmentPolicy {
  int n_time_masks = 2;
  int max_time_width = 0;          // frames; used when max_time_fraction <= 0
  double max_time_fraction = 0.1;  // if > 0, cap is floor(fraction * T)
  int n_feat_masks = 2;
  int max_feat_width = 4;          // feature bins
  double fill_value = 0.0;

  // 2 time masks up to 10% of T, 2 feature masks up to 25% of D.
  static AugmentPolicy Default(int feature_dim);
  static AugmentPolicy Disabled();

  int TimeWidthCap(long frames) const;
  void Validate() const;
};

// Each mask draws a width uniformly from [0, cap] and a start uniformly from
// the positions where it fits. Cells outside every mask are copied unchanged.
Matrix ApplyAugment(const Matrix& features, const AugmentPolicy& policy,
                    std::mt19937_64& rng);

}  // namespace mpl

#endif  // MPL_AUGMENT_H_
