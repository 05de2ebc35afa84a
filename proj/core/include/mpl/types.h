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

#ifndef MPL_TYPES_H_
#define MPL_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mpl {

// Row-major so that one frame is one contiguous row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Token ids lie in [0, V); id V is the CTC blank and never appears here.
using TokenSequence = std::vector<int>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes, out-of-range values, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// NaN/Inf appearing where a finite value is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated serialized data. offset() is the byte position at
// which decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Wrong magic or unsupported format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpl

#endif  // MPL_TYPES_H_
