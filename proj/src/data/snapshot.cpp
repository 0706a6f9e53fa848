// Copyright 2026 The EDBA-FL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "data/snapshot.hpp"

#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/format.hpp"

namespace edba {

namespace {
constexpr std::string_view kMagic = "EDBADATA";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_dataset(const std::string& path, const AnyDataset& any) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  if (const auto* v = std::get_if<VisionDataset>(&any)) {
    w.u32(0);
    w.u64(v->size());
    w.u64(v->dim());
    w.u64(v->classes);
    w.f64_array(v->inputs.data);
    for (int y : v->labels) w.u32(static_cast<std::uint32_t>(y));
  } else {
    const auto& t = std::get<TextDataset>(any);
    w.u32(1);
    w.u64(t.size());
    w.u64(t.seq_len());
    w.u64(t.vocab.vocab);
    w.u64(t.vocab.classes);
    for (auto tok : t.sequences.tokens) w.u32(tok);
    for (int y : t.labels) w.u32(static_cast<std::uint32_t>(y));
  }
  w.write_file(path);
}

AnyDataset load_dataset(const std::string& path) {
  auto r = ByteReader::from_file(path);
  r.expect_magic(kMagic);
  require(r.u32() == kVersion, ErrorCode::io, "unsupported dataset snapshot version");
  const auto kind = r.u32();
  if (kind == 0) {
    VisionDataset v;
    const auto n = r.u64(), d = r.u64();
    v.classes = r.u64();
    v.inputs = Tensor({n, d}, r.f64_array(n * d));
    for (std::uint64_t i = 0; i < n; ++i) v.labels.push_back(static_cast<int>(r.u32()));
    return v;
  }
  require(kind == 1, ErrorCode::io, "unknown dataset kind");
  TextDataset t;
  const auto n = r.u64(), len = r.u64(), vocab = r.u64(), k = r.u64();
  t.vocab = TextVocab::standard(vocab, k);
  t.sequences.seq_len = len;
  for (std::uint64_t i = 0; i < n * len; ++i) t.sequences.tokens.push_back(r.u32());
  for (std::uint64_t i = 0; i < n; ++i) t.labels.push_back(static_cast<int>(r.u32()));
  return t;
}

void export_dataset_csv(const std::string& path, const AnyDataset& any) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open for writing: " + path);
  if (const auto* v = std::get_if<VisionDataset>(&any)) {
    out << "label";
    for (std::size_t k = 0; k < v->dim(); ++k) out << ",x" << k;
    out << '\n';
    for (std::size_t i = 0; i < v->size(); ++i) {
      out << v->labels[i];
      for (double x : v->inputs.row(i)) out << ',' << format_double(x);
      out << '\n';
    }
  } else {
    const auto& t = std::get<TextDataset>(any);
    out << "label";
    for (std::size_t k = 0; k < t.seq_len(); ++k) out << ",t" << k;
    out << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
      out << t.labels[i];
      for (auto tok : t.sequences.row(i)) out << ',' << tok;
      out << '\n';
    }
  }
  require(static_cast<bool>(out), ErrorCode::io, "write failed: " + path);
}

}  // namespace edba
