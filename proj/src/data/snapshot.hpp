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

#include "data/datasets.hpp"

namespace edba {

// "EDBADATA" | u32 version | u32 kind (0 vision, 1 text) | payload.
// Vision payload: u64 n | u64 d | u64 K | f64 inputs[n*d] | u32 labels[n]
// Text payload:   u64 n | u64 seq_len | u64 vocab | u64 K | u32 tokens[n*seq_len] | u32 labels[n]
using AnyDataset = std::variant<VisionDataset, TextDataset>;

void save_dataset(const std::string& path, const AnyDataset& ds);
AnyDataset load_dataset(const std::string& path);

// One row per sample: label then features (or token ids).
void export_dataset_csv(const std::string& path, const AnyDataset& ds);

}  // namespace edba
