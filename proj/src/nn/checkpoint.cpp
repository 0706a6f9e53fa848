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

#include "nn/checkpoint.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace edba {

namespace {
constexpr std::string_view kMagic = "EDBACKPT";
}

void write_params(ByteWriter& w, const FlatParams& params) {
  w.u32(static_cast<std::uint32_t>(params.layout().size()));
  for (const auto& s : params.layout()) {
    w.str(s.name);
    w.u64(s.offset);
    w.u32(static_cast<std::uint32_t>(s.shape.size()));
    for (auto d : s.shape) w.u64(d);
  }
  w.u64(params.size());
  w.f64_array(params.data());
}

FlatParams read_params(ByteReader& r) {
  const auto slots = r.u32();
  std::vector<ParamSlot> layout;
  layout.reserve(slots);
  for (std::uint32_t i = 0; i < slots; ++i) {
    ParamSlot s;
    s.name = r.str();
    s.offset = r.u64();
    const auto rank = r.u32();
    for (std::uint32_t k = 0; k < rank; ++k) s.shape.push_back(r.u64());
    layout.push_back(std::move(s));
  }
  const auto n = r.u64();
  return FlatParams::from_layout(std::move(layout), r.f64_array(n));
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.str(ckpt.architecture);
  write_params(w, ckpt.params);
  return w.buffer();
}

Checkpoint decode_checkpoint(std::string bytes) {
  ByteReader r(std::move(bytes));
  r.expect_magic(kMagic);
  const auto version = r.u32();
  require(version == kCheckpointVersion, ErrorCode::io,
          "unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.architecture = r.str();
  c.params = read_params(r);
  require(r.at_end(), ErrorCode::io, "trailing bytes after checkpoint");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ByteWriter w;
  w.bytes(encode_checkpoint(ckpt));
  w.write_file(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace edba
