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

// JSON conversions shared by the serializers and the harness. Internal.

#ifndef MPL_SRC_JSON_UTIL_H_
#define MPL_SRC_JSON_UTIL_H_

#include <nlohmann/json.hpp>

#include "mpl/data.h"
#include "mpl/model.h"

namespace mpl {

inline nlohmann::json ArchToJson(const Architecture& a) {
  return {{"D", a.input_dim},
          {"context", a.context},
          {"H", a.hidden},
          {"n_hidden", a.n_hidden},
          {"V", a.vocab_size}};
}

inline Architecture ArchFromJson(const nlohmann::json& j) {
  Architecture a;
  a.input_dim = j.at("D").get<int>();
  a.context = j.at("context").get<int>();
  a.hidden = j.at("H").get<int>();
  a.n_hidden = j.at("n_hidden").get<int>();
  a.vocab_size = j.at("V").get<int>();
  return a;
}

// Missing keys keep their CorpusSpec defaults.
nlohmann::json CorpusSpecToJson(const CorpusSpec& spec);
CorpusSpec CorpusSpecFromJson(const nlohmann::json& j);

}  // namespace mpl

#endif  // MPL_SRC_JSON_UTIL_H_
