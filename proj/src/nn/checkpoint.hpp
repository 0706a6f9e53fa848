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

#pragma once

#include <string>

#include "nn/params.hpp"

namespace edba {

// Binary checkpoint layout (little-endian):
//   "EDBACKPT" | u32 version | str architecture | u32 slot count
//   per slot: str name | u64 offset | u32 rank | u64 dims[rank]
//   u64 value count | f64 values[count]
// Strings are u32-length-prefixed UTF-8.
struct Checkpoint {
  std::string architecture;
  FlatParams params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

class ByteWriter;
class ByteReader;
// Layout-table helpers shared by the trigger and dataset snapshot formats.
void write_params(ByteWriter& w, const FlatParams& params);
FlatParams read_params(ByteReader& r);

}  // namespace edba
