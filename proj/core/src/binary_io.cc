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

#include "mpl/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace mpl {

template <typename T>
void ByteWriter::Le(T v, int n) {
  for (int i = 0; i < n; ++i)
    bytes_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void ByteWriter::Raw(std::string_view s) {
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}
void ByteWriter::U8(std::uint8_t v) { bytes_.push_back(v); }
void ByteWriter::U16(std::uint16_t v) { Le(v, 2); }
void ByteWriter::U32(std::uint32_t v) { Le(v, 4); }
void ByteWriter::U64(std::uint64_t v) { Le(v, 8); }
void ByteWriter::F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
void ByteWriter::LengthPrefixed(std::string_view s) {
  U64(s.size());
  Raw(s);
}

void ByteReader::Need(size_t n, std::string_view field) const {
  if (bytes_.size() - pos_ < n)
    throw FormatError("truncated input reading " + std::string(field) +
                          " (need " + std::to_string(n) + " bytes, have " +
                          std::to_string(bytes_.size() - pos_) + ")",
                      pos_);
}

template <typename T>
T ByteReader::Le(int n, std::string_view field) {
  Need(n, field);
  T v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<T>(bytes_[pos_ + i]) << (8 * i);
  pos_ += n;
  return v;
}

std::string ByteReader::Raw(size_t n, std::string_view field) {
  Need(n, field);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}
std::uint8_t ByteReader::U8(std::string_view field) {
  return Le<std::uint8_t>(1, field);
}
std::uint16_t ByteReader::U16(std::string_view field) {
  return Le<std::uint16_t>(2, field);
}
std::uint32_t ByteReader::U32(std::string_view field) {
  return Le<std::uint32_t>(4, field);
}
std::uint64_t ByteReader::U64(std::string_view field) {
  return Le<std::uint64_t>(8, field);
}
float ByteReader::F32(std::string_view field) {
  return std::bit_cast<float>(U32(field));
}
double ByteReader::F64(std::string_view field) {
  return std::bit_cast<double>(U64(field));
}
std::string ByteReader::LengthPrefixed(std::string_view field) {
  const std::uint64_t start = pos_;
  const std::uint64_t n = U64(field);
  if (n > bytes_.size() - pos_)
    throw FormatError("length prefix of " + std::string(field) + " (" +
                          std::to_string(n) + ") runs past end of input",
                      start);
  return Raw(static_cast<size_t>(n), field);
}

Bytes ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path, const Bytes& bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace mpl
