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

#include "mpl/data.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "json_util.h"
#include "seeding.h"

namespace mpl {

namespace {

enum Stream : std::uint64_t {
  kPrototypeStream = 1000,
  kJitterStream = 1001,
  kRotationStream = 1002,
};

// Everything the generator needs for one domain.
struct DomainModel {
  Matrix prototypes;  // V x D
  Matrix rotation;    // D x D, applied as frame * rotation^T; empty if none
  double noise_std = 0.0;
};

Matrix RandomPlaneRotation(int dim, double angle, std::mt19937_64& rng) {
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix r = Matrix::Identity(dim, dim);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int k = 0; k + 1 < dim; k += 2) {
    const int i = order[k], j = order[k + 1];
    r(i, i) = c;
    r(i, j) = -s;
    r(j, i) = s;
    r(j, j) = c;
  }
  return r;
}

DomainModel MakeDomain(const CorpusSpec& spec, const Prototypes& protos,
                       bool shifted) {
  DomainModel d;
  d.prototypes = shifted ? protos.shifted : protos.in_domain;
  d.noise_std = spec.noise_std;
  if (!shifted) return d;
  for (size_t k = 0; k < spec.shifts.size(); ++k) {
    const DomainShift& s = spec.shifts[k];
    if (s.kind == DomainShift::Kind::kNoiseScale) {
      d.noise_std *= s.magnitude;
    } else if (s.kind == DomainShift::Kind::kLinearTransform) {
      std::mt19937_64 rng(StreamSeed(spec.seed, kRotationStream, k));
      Matrix r = RandomPlaneRotation(spec.feature_dim, s.magnitude, rng);
      d.rotation = d.rotation.size() == 0 ? r : Matrix(r * d.rotation);
    }
  }
  return d;
}

TokenSequence SampleTokens(const CorpusSpec& spec, std::mt19937_64& rng) {
  const int len =
      std::uniform_int_distribution<int>(spec.min_len, spec.max_len)(rng);
  TokenSequence tokens;
  tokens.reserve(len);
  for (int l = 0; l < len; ++l) {
    if (l == 0 || spec.allow_adjacent_repeats) {
      tokens.push_back(
          std::uniform_int_distribution<int>(0, spec.vocab_size - 1)(rng));
    } else {
      // Uniform over the V-1 tokens that differ from the previous one.
      int t = std::uniform_int_distribution<int>(0, spec.vocab_size - 2)(rng);
      if (t >= tokens.back()) ++t;
      tokens.push_back(t);
    }
  }
  return tokens;
}

Utterance SampleUtterance(const CorpusSpec& spec, const DomainModel& domain,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Utterance u;
  u.label = SampleTokens(spec, rng);
  std::vector<int> frames(u.label.size());
  for (int& r : frames)
    r = std::uniform_int_distribution<int>(spec.min_frames, spec.max_frames)(rng);
  const int T = std::accumulate(frames.begin(), frames.end(), 0);
  u.features.resize(T, spec.feature_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  int t = 0;
  for (size_t l = 0; l < u.label.size(); ++l) {
    for (int f = 0; f < frames[l]; ++f, ++t) {
      for (int d = 0; d < spec.feature_dim; ++d)
        u.features(t, d) =
            domain.prototypes(u.label[l], d) + domain.noise_std * normal(rng);
    }
  }
  if (domain.rotation.size() != 0)
    u.features = u.features * domain.rotation.transpose();
  // Stored as f32 on disk; keep the in-memory copy exactly representable.
  u.features = u.features.cast<float>().cast<double>();
  return u;
}

std::vector<Utterance> SampleSplit(const CorpusSpec& spec,
                                   const DomainModel& domain, SplitTag tag,
                                   int count) {
  std::vector<Utterance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(SampleUtterance(
        spec, domain,
        StreamSeed(spec.seed, static_cast<std::uint64_t>(tag), i)));
  return out;
}

}  // namespace

std::string ShiftKindName(DomainShift::Kind kind) {
  switch (kind) {
    case DomainShift::Kind::kNone: return "none";
    case DomainShift::Kind::kLinearTransform: return "linear_transform";
    case DomainShift::Kind::kNoiseScale: return "noise_scale";
    case DomainShift::Kind::kPrototypeJitter: return "prototype_jitter";
  }
  return "none";
}

DomainShift::Kind ParseShiftKind(const std::string& name) {
  for (auto k : {DomainShift::Kind::kNone, DomainShift::Kind::kLinearTransform,
                 DomainShift::Kind::kNoiseScale,
                 DomainShift::Kind::kPrototypeJitter})
    if (ShiftKindName(k) == name) return k;
  throw InvalidArgument("unknown domain shift kind '" + name + "'");
}

void DomainShift::Validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
    throw InvalidArgument("domain shift magnitude must be finite and >= 0");
  if (kind == Kind::kNone && magnitude != 0.0)
    throw InvalidArgument("domain shift 'none' requires magnitude 0");
}

bool CorpusSpec::Shifted() const {
  return std::any_of(shifts.begin(), shifts.end(), [](const DomainShift& s) {
    return s.kind != DomainShift::Kind::kNone;
  });
}

void CorpusSpec::Validate() const {
  if (vocab_size < 1 || vocab_size > 65535 || feature_dim < 1)
    throw InvalidArgument("corpus needs 1 <= V <= 65535 and D >= 1");
  if (n_labeled < 0 || n_unlabeled < 0 || n_valid < 0 || n_test < 0)
    throw InvalidArgument("corpus split sizes must be >= 0");
  if (n_labeled + n_unlabeled < 1)
    throw InvalidArgument("corpus needs at least one training utterance");
  if (min_len < 1 || max_len < min_len)
    throw InvalidArgument("label length range [min_len, max_len] is empty");
  if (min_frames < 1 || max_frames < min_frames)
    throw InvalidArgument(
        "frames-per-token range must satisfy 1 <= min_frames <= max_frames");
  if (!(noise_std >= 0.0) || !(prototype_std > 0.0))
    throw InvalidArgument("noise_std must be >= 0 and prototype_std > 0");
  if (!allow_adjacent_repeats && vocab_size < 2 && max_len > 1)
    throw InvalidArgument(
        "labels longer than 1 need V >= 2 when adjacent repeats are disallowed");
  for (const DomainShift& s : shifts) s.Validate();
}

Prototypes MakePrototypes(const CorpusSpec& spec) {
  Prototypes p;
  std::mt19937_64 rng(StreamSeed(spec.seed, kPrototypeStream, 0));
  std::normal_distribution<double> normal(0.0, spec.prototype_std);
  p.in_domain.resize(spec.vocab_size, spec.feature_dim);
  for (Eigen::Index i = 0; i < p.in_domain.size(); ++i)
    p.in_domain.data()[i] = normal(rng);
  p.shifted = p.in_domain;
  for (size_t k = 0; k < spec.shifts.size(); ++k) {
    const DomainShift& s = spec.shifts[k];
    if (s.kind != DomainShift::Kind::kPrototypeJitter) continue;
    std::mt19937_64 jrng(StreamSeed(spec.seed, kJitterStream, k));
    std::normal_distribution<double> jitter(0.0, s.magnitude);
    for (Eigen::Index i = 0; i < p.shifted.size(); ++i)
      p.shifted.data()[i] += jitter(jrng);
  }
  return p;
}

Corpus GenerateCorpus(const CorpusSpec& spec) {
  spec.Validate();
  const Prototypes protos = MakePrototypes(spec);
  const DomainModel in_domain = MakeDomain(spec, protos, false);
  const DomainModel out_domain = MakeDomain(spec, protos, spec.Shifted());

  Corpus c;
  c.spec = spec;
  c.labeled = SampleSplit(spec, in_domain, SplitTag::kLabeled, spec.n_labeled);
  for (Utterance& u : SampleSplit(spec, out_domain, SplitTag::kUnlabeled,
                                  spec.n_unlabeled)) {
    c.unlabeled_features.push_back(std::move(u.features));
    c.unlabeled_references.push_back(std::move(u.label));
  }
  c.valid_in = SampleSplit(spec, in_domain, SplitTag::kValidIn, spec.n_valid);
  c.test_in = SampleSplit(spec, in_domain, SplitTag::kTestIn, spec.n_test);
  if (spec.Shifted()) {
    c.valid_out =
        SampleSplit(spec, out_domain, SplitTag::kValidOut, spec.n_valid);
    c.test_out = SampleSplit(spec, out_domain, SplitTag::kTestOut, spec.n_test);
  }
  return c;
}

std::vector<Utterance> Corpus::RevealUnlabeled() const {
  std::vector<Utterance> out;
  out.reserve(unlabeled_features.size());
  for (size_t i = 0; i < unlabeled_features.size(); ++i)
    out.push_back({unlabeled_features[i], unlabeled_references[i]});
  return out;
}

bool Corpus::operator==(const Corpus& o) const {
  if (!(spec == o.spec && labeled == o.labeled &&
        unlabeled_references == o.unlabeled_references &&
        valid_in == o.valid_in && test_in == o.test_in &&
        valid_out == o.valid_out && test_out == o.test_out &&
        unlabeled_features.size() == o.unlabeled_features.size()))
    return false;
  for (size_t i = 0; i < unlabeled_features.size(); ++i) {
    const Matrix& a = unlabeled_features[i];
    const Matrix& b = o.unlabeled_features[i];
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

nlohmann::json CorpusSpecToJson(const CorpusSpec& spec) {
  nlohmann::json shifts = nlohmann::json::array();
  for (const DomainShift& s : spec.shifts)
    shifts.push_back({{"kind", ShiftKindName(s.kind)},
                      {"magnitude", s.magnitude}});
  return {{"V", spec.vocab_size},
          {"D", spec.feature_dim},
          {"n_labeled", spec.n_labeled},
          {"n_unlabeled", spec.n_unlabeled},
          {"n_valid", spec.n_valid},
          {"n_test", spec.n_test},
          {"min_len", spec.min_len},
          {"max_len", spec.max_len},
          {"min_frames", spec.min_frames},
          {"max_frames", spec.max_frames},
          {"noise_std", spec.noise_std},
          {"prototype_std", spec.prototype_std},
          {"allow_adjacent_repeats", spec.allow_adjacent_repeats},
          {"shifts", shifts},
          {"seed", spec.seed}};
}

CorpusSpec CorpusSpecFromJson(const nlohmann::json& j) {
  CorpusSpec s;
  s.vocab_size = j.value("V", s.vocab_size);
  s.feature_dim = j.value("D", s.feature_dim);
  s.n_labeled = j.value("n_labeled", s.n_labeled);
  s.n_unlabeled = j.value("n_unlabeled", s.n_unlabeled);
  s.n_valid = j.value("n_valid", s.n_valid);
  s.n_test = j.value("n_test", s.n_test);
  s.min_len = j.value("min_len", s.min_len);
  s.max_len = j.value("max_len", s.max_len);
  s.min_frames = j.value("min_frames", s.min_frames);
  s.max_frames = j.value("max_frames", s.max_frames);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.prototype_std = j.value("prototype_std", s.prototype_std);
  s.allow_adjacent_repeats =
      j.value("allow_adjacent_repeats", s.allow_adjacent_repeats);
  s.seed = j.value("seed", s.seed);
  if (j.contains("shifts")) {
    for (const auto& js : j.at("shifts")) {
      DomainShift d;
      d.kind = ParseShiftKind(js.at("kind").get<std::string>());
      d.magnitude = js.value("magnitude", 0.0);
      s.shifts.push_back(d);
    }
  }
  return s;
}

namespace {

void WriteRecord(ByteWriter& w, SplitTag tag, const Matrix& features,
                 const TokenSequence& label) {
  w.U8(static_cast<std::uint8_t>(tag));
  w.U32(static_cast<std::uint32_t>(features.rows()));
  w.U32(static_cast<std::uint32_t>(label.size()));
  for (Eigen::Index t = 0; t < features.rows(); ++t)
    for (Eigen::Index d = 0; d < features.cols(); ++d)
      w.F32(static_cast<float>(features(t, d)));
  for (int token : label) w.U16(static_cast<std::uint16_t>(token));
}

}  // namespace

Bytes EncodeCorpus(const Corpus& corpus) {
  ByteWriter w;
  w.Raw(kCorpusMagic);
  const nlohmann::json header = {
      {"version", 1},
      {"spec", CorpusSpecToJson(corpus.spec)},
      {"counts",
       {{"labeled", corpus.labeled.size()},
        {"unlabeled", corpus.unlabeled_features.size()},
        {"valid_in", corpus.valid_in.size()},
        {"test_in", corpus.test_in.size()},
        {"valid_out", corpus.valid_out.size()},
        {"test_out", corpus.test_out.size()}}}};
  w.LengthPrefixed(header.dump());
  for (const Utterance& u : corpus.labeled)
    WriteRecord(w, SplitTag::kLabeled, u.features, u.label);
  for (size_t i = 0; i < corpus.unlabeled_features.size(); ++i)
    WriteRecord(w, SplitTag::kUnlabeled, corpus.unlabeled_features[i],
                corpus.unlabeled_references[i]);
  const std::pair<SplitTag, const std::vector<Utterance>*> eval_splits[] = {
      {SplitTag::kValidIn, &corpus.valid_in},
      {SplitTag::kTestIn, &corpus.test_in},
      {SplitTag::kValidOut, &corpus.valid_out},
      {SplitTag::kTestOut, &corpus.test_out}};
  for (const auto& [tag, split] : eval_splits)
    for (const Utterance& u : *split) WriteRecord(w, tag, u.features, u.label);
  return w.Take();
}

Corpus DecodeCorpus(const Bytes& bytes) {
  ByteReader r(bytes);
  if (r.Raw(8, "magic") != kCorpusMagic)
    throw VersionError("not an MPLCORP1 corpus (bad magic)");
  const std::uint64_t header_offset = r.offset();
  const std::string header_text = r.LengthPrefixed("header");
  Corpus c;
  std::map<std::string, std::uint64_t> counts;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_text);
    if (header.at("version").get<int>() != 1)
      throw VersionError("unsupported MPLCORP1 version " +
                         header.at("version").dump());
    c.spec = CorpusSpecFromJson(header.at("spec"));
    c.spec.Validate();
    counts = header.at("counts").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed corpus header: ") + e.what(),
                      header_offset);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid corpus spec: ") + e.what(),
                      header_offset);
  }

  const int D = c.spec.feature_dim;
  while (!r.AtEnd()) {
    const std::uint64_t record_offset = r.offset();
    const std::uint8_t tag = r.U8("split tag");
    if (tag > static_cast<std::uint8_t>(SplitTag::kTestOut))
      throw FormatError("unknown split tag " + std::to_string(tag),
                        record_offset);
    const std::uint32_t T = r.U32("frame count");
    const std::uint32_t L = r.U32("label length");
    Utterance u;
    u.features.resize(T, D);
    for (std::uint32_t t = 0; t < T; ++t)
      for (int d = 0; d < D; ++d) u.features(t, d) = r.F32("feature");
    u.label.resize(L);
    for (std::uint32_t l = 0; l < L; ++l) {
      const std::uint64_t token_offset = r.offset();
      u.label[l] = r.U16("token");
      if (u.label[l] >= c.spec.vocab_size)
        throw FormatError("token " + std::to_string(u.label[l]) +
                              " outside vocabulary",
                          token_offset);
    }
    switch (static_cast<SplitTag>(tag)) {
      case SplitTag::kLabeled: c.labeled.push_back(std::move(u)); break;
      case SplitTag::kUnlabeled:
        c.unlabeled_features.push_back(std::move(u.features));
        c.unlabeled_references.push_back(std::move(u.label));
        break;
      case SplitTag::kValidIn: c.valid_in.push_back(std::move(u)); break;
      case SplitTag::kTestIn: c.test_in.push_back(std::move(u)); break;
      case SplitTag::kValidOut: c.valid_out.push_back(std::move(u)); break;
      case SplitTag::kTestOut: c.test_out.push_back(std::move(u)); break;
    }
  }
  const std::pair<const char*, size_t> actual[] = {
      {"labeled", c.labeled.size()},
      {"unlabeled", c.unlabeled_features.size()},
      {"valid_in", c.valid_in.size()},
      {"test_in", c.test_in.size()},
      {"valid_out", c.valid_out.size()},
      {"test_out", c.test_out.size()}};
  for (const auto& [name, n] : actual) {
    if (counts[name] != n)
      throw FormatError(std::string("record count for split '") + name +
                            "' is " + std::to_string(n) + ", header says " +
                            std::to_string(counts[name]),
                        r.offset());
  }
  return c;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeCorpus(corpus));
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  return DecodeCorpus(ReadFileBytes(path));
}

}  // namespace mpl
