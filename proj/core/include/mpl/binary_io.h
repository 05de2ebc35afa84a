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

// Little-endian byte encoding shared by the corpus and checkpoint formats.

#ifndef MPL_BINARY_IO_H_
#define MPL_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mpl/types.h"

namespace mpl {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  void Raw(std::string_view s);
  void U8(std::uint8_t v);
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F32(float v);
  void F64(double v);
  // u64 length followed by the UTF-8 bytes.
  void LengthPrefixed(std::string_view s);

  const Bytes& bytes() const { return bytes_; }
  Bytes Take() { return std::move(bytes_); }

 private:
  template <typename T>
  void Le(T v, int n);
  Bytes bytes_;
};

// Every read checks bounds and throws FormatError carrying the offset of the
// field that could not be read.
class ByteReader {
 public:
  explicit ByteReader(const Bytes& bytes) : bytes_(bytes) {}

  std::string Raw(size_t n, std::string_view field);
  std::uint8_t U8(std::string_view field);
  std::uint16_t U16(std::string_view field);
  std::uint32_t U32(std::string_view field);
  std::uint64_t U64(std::string_view field);
  float F32(std::string_view field);
  double F64(std::string_view field);
  std::string LengthPrefixed(std::string_view field);

  std::uint64_t offset() const { return pos_; }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n, std::string_view field) const;
  template <typename T>
  T Le(int n, std::string_view field);
  const Bytes& bytes_;
  size_t pos_ = 0;
};

Bytes ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, const Bytes& bytes);

}  // namespace mpl

#endif  // MPL_BINARY_IO_H_
