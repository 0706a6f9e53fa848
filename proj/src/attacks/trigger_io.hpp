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
#include <variant>

#include "attacks/triggers.hpp"

namespace edba {

// "EDBATRIG" | u32 version | u32 kind (0 vision, 1 text) | u64 trigger version
// vision: u32 rank | u64 dims[rank] | f64 values[prod(dims)]
// text:   u64 M | u32 tokens[M] | u64 positions[M]
using AnyTrigger = std::variant<VisionTrigger, TextTrigger>;

std::string encode_trigger(const AnyTrigger& trigger);
AnyTrigger decode_trigger(std::string bytes);
void save_trigger(const std::string& path, const AnyTrigger& trigger);
AnyTrigger load_trigger(const std::string& path);

}  // namespace edba
