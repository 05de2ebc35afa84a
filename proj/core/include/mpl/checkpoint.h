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

// MPLCKPT1 checkpoint files:
//   8 bytes   "MPLCKPT1"
//   u64       header length, then that many bytes of UTF-8 JSON:
//             {"arch": {"D","context","H","n_hidden","V"}, "step": n}
//   u64       parameter count
//   f64[count] parameters
// All integers and floats little-endian.

#ifndef MPL_CHECKPOINT_H_
#define MPL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>

#include "mpl/binary_io.h"
#include "mpl/model.h"

namespace mpl {

inline constexpr char kCheckpointMagic[] = "MPLCKPT1";

struct Checkpoint {
  ParamVector params;
  std::int64_t step = 0;
};

Bytes EncodeCheckpoint(const Checkpoint& checkpoint);
Checkpoint DecodeCheckpoint(const Bytes& bytes);

void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace mpl

#endif  // MPL_CHECKPOINT_H_
