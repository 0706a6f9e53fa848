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

#include "attacks/trigger_io.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace edba {

namespace {
constexpr std::string_view kMagic = "EDBATRIG";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string encode_trigger(const AnyTrigger& any) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  if (const auto* v = std::get_if<VisionTrigger>(&any)) {
    w.u32(0);
    w.u64(v->version);
    w.u32(static_cast<std::uint32_t>(v->pattern.shape.size()));
    for (auto d : v->pattern.shape) w.u64(d);
    w.f64_array(v->pattern.data);
  } else {
    const auto& t = std::get<TextTrigger>(any);
    require(t.tokens.size() == t.positions.size(), ErrorCode::invalid_argument,
            "text trigger tokens and positions differ in length");
    w.u32(1);
    w.u64(t.version);
    w.u64(t.tokens.size());
    for (auto tok : t.tokens) w.u32(tok);
    for (auto p : t.positions) w.u64(p);
  }
  return w.buffer();
}

AnyTrigger decode_trigger(std::string bytes) {
  ByteReader r(std::move(bytes));
  r.expect_magic(kMagic);
  require(r.u32() == kVersion, ErrorCode::io, "unsupported trigger snapshot version");
  const auto kind = r.u32();
  const auto version = r.u64();
  if (kind == 0) {
    VisionTrigger v;
    v.version = version;
    const auto rank = r.u32();
    std::vector<std::size_t> shape;
    for (std::uint32_t k = 0; k < rank; ++k) shape.push_back(r.u64());
    const auto n = Tensor::element_count(shape);
    v.pattern = Tensor(std::move(shape), r.f64_array(n));
    require(r.at_end(), ErrorCode::io, "trailing bytes after trigger");
    return v;
  }
  require(kind == 1, ErrorCode::io, "unknown trigger kind");
  TextTrigger t;
  t.version = version;
  const auto m = r.u64();
  for (std::uint64_t i = 0; i < m; ++i) t.tokens.push_back(r.u32());
  for (std::uint64_t i = 0; i < m; ++i) t.positions.push_back(r.u64());
  require(r.at_end(), ErrorCode::io, "trailing bytes after trigger");
  return t;
}

void save_trigger(const std::string& path, const AnyTrigger& trigger) {
  ByteWriter w;
  w.bytes(encode_trigger(trigger));
  w.write_file(path);
}

AnyTrigger load_trigger(const std::string& path) { return decode_trigger(read_file(path)); }

}  // namespace edba
