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

#include <cstdint>
#include <span>
#include <vector>

#include "common/rng.hpp"
#include "nn/models.hpp"
#include "nn/tensor.hpp"

namespace edba {

// Per-batch poisoning: `ratio` of each batch (e.g. 5/64) gets the trigger and
// the target label.
struct PoisonSpec {
  double ratio = 5.0 / 64.0;
  int target_label = 0;

  std::size_t rows_for(std::size_t batch_size) const;
};

struct PoisonedBatch {
  Tensor inputs;
  std::vector<int> labels;
  std::vector<std::size_t> poisoned_rows;  // ascending
  bool nothing_poisoned = false;           // ratio * batch rounded to zero
};

// Adds the trigger to round(ratio * B) rows chosen uniformly (seeded by `rng`),
// clips them to [0,1] and relabels them. The input batch is not modified.
// When no row is selected the rng is left untouched.
PoisonedBatch poison_vision_batch(const Tensor& batch, std::span<const int> labels,
                                  const PoisonSpec& spec, const Tensor& trigger, Rng& rng);

// clip(x + trigger, 0, 1) applied to every row.
Tensor apply_vision_trigger(const Tensor& batch, const Tensor& trigger);

// Replaces the tokens at `positions` with `trigger_tokens` (in order).
std::vector<std::uint32_t> poison_text_sequence(std::span<const std::uint32_t> seq,
                                                std::span<const std::uint32_t> trigger_tokens,
                                                std::span<const std::size_t> positions);

struct PoisonedTokens {
  TokenBatch inputs;
  std::vector<int> labels;
  std::vector<std::size_t> poisoned_rows;
  bool nothing_poisoned = false;
};

// Text counterpart of poison_vision_batch: selected rows get the trigger
// tokens at `positions` and the target label.
PoisonedTokens poison_text_batch(const TokenBatch& batch, std::span<const int> labels,
                                 const PoisonSpec& spec,
                                 std::span<const std::uint32_t> trigger_tokens,
                                 std::span<const std::size_t> positions, Rng& rng);

// Every row gets the trigger; labels are untouched.
TokenBatch apply_text_trigger(const TokenBatch& batch, std::span<const std::uint32_t> trigger_tokens,
                              std::span<const std::size_t> positions);

}  // namespace edba
