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

#include "mpl/checkpoint.h"

#include <string>

#include "json_util.h"

namespace mpl {

Bytes EncodeCheckpoint(const Checkpoint& checkpoint) {
  checkpoint.params.Validate();
  ByteWriter w;
  w.Raw(kCheckpointMagic);
  const nlohmann::json header = {{"arch", ArchToJson(checkpoint.params.arch)},
                                 {"step", checkpoint.step}};
  w.LengthPrefixed(header.dump());
  w.U64(static_cast<std::uint64_t>(checkpoint.params.values.size()));
  for (double v : checkpoint.params.values) w.F64(v);
  return w.Take();
}

Checkpoint DecodeCheckpoint(const Bytes& bytes) {
  ByteReader r(bytes);
  if (r.Raw(8, "magic") != kCheckpointMagic)
    throw VersionError("not an MPLCKPT1 checkpoint (bad magic)");
  const std::uint64_t header_offset = r.offset();
  const std::string header_text = r.LengthPrefixed("header");
  Checkpoint ck;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_text);
    ck.params.arch = ArchFromJson(header.at("arch"));
    ck.params.arch.Validate();
    ck.step = header.at("step").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what(),
                      header_offset);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid checkpoint architecture: ") + e.what(),
                      header_offset);
  }
  const std::uint64_t count_offset = r.offset();
  const std::uint64_t count = r.U64("parameter count");
  if (count != static_cast<std::uint64_t>(ck.params.arch.ParamCount()))
    throw FormatError("parameter count " + std::to_string(count) +
                          " does not match header architecture",
                      count_offset);
  ck.params.values.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i)
    ck.params.values[static_cast<Eigen::Index>(i)] = r.F64("parameter");
  if (!ck.params.values.allFinite())
    throw FormatError("non-finite parameter value", count_offset);
  if (!r.AtEnd())
    throw FormatError("trailing bytes after checkpoint payload", r.offset());
  return ck;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint) {
  WriteFileBytes(path, EncodeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFileBytes(path));
}

}  // namespace mpl
