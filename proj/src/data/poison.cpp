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

#include "data/poison.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace edba {

std::size_t PoisonSpec::rows_for(std::size_t batch_size) const {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(batch_size)));
}

Tensor apply_vision_trigger(const Tensor& batch, const Tensor& trigger) {
  require(trigger.size() == batch.cols(), ErrorCode::shape_mismatch,
          "trigger shape " + trigger.shape_string() + " does not match input width " +
              std::to_string(batch.cols()));
  Tensor out = batch;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] = std::clamp(row[k] + trigger.data[k], 0.0, 1.0);
  }
  return out;
}

namespace {

void check_ratio(const PoisonSpec& spec) {
  require(spec.ratio >= 0.0 && spec.ratio < 1.0, ErrorCode::invalid_argument,
          "poison ratio must lie in [0,1)");
}

// Uniform sample of `count` rows, ascending.
std::vector<std::size_t> sample_rows(std::size_t rows, std::size_t count, Rng& rng) {
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + uniform_index(rng, rows - i);
    std::swap(order[i], order[j]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

PoisonedBatch poison_vision_batch(const Tensor& batch, std::span<const int> labels,
                                  const PoisonSpec& spec, const Tensor& trigger, Rng& rng) {
  check_ratio(spec);
  require(trigger.size() == batch.cols(), ErrorCode::shape_mismatch,
          "trigger shape " + trigger.shape_string() + " does not match input width " +
              std::to_string(batch.cols()));
  PoisonedBatch out{batch, std::vector<int>(labels.begin(), labels.end()), {}, false};
  const std::size_t rows = batch.rows();
  const std::size_t count = std::min(spec.rows_for(rows), rows);
  if (count == 0) {
    out.nothing_poisoned = true;
    return out;
  }
  out.poisoned_rows = sample_rows(rows, count, rng);
  for (auto r : out.poisoned_rows) {
    auto row = out.inputs.row(r);
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] = std::clamp(row[k] + trigger.data[k], 0.0, 1.0);
    out.labels[r] = spec.target_label;
  }
  return out;
}

std::vector<std::uint32_t> poison_text_sequence(std::span<const std::uint32_t> seq,
                                                std::span<const std::uint32_t> trigger_tokens,
                                                std::span<const std::size_t> positions) {
  require(trigger_tokens.size() == positions.size(), ErrorCode::invalid_argument,
          "trigger token count differs from position count");
  std::vector<std::uint32_t> out(seq.begin(), seq.end());
  std::vector<bool> seen(seq.size(), false);
  for (std::size_t m = 0; m < positions.size(); ++m) {
    const auto p = positions[m];
    require(p < seq.size(), ErrorCode::invalid_argument,
            "trigger position " + std::to_string(p) + " beyond sequence length");
    require(!seen[p], ErrorCode::invalid_argument,
            "duplicate trigger position " + std::to_string(p));
    seen[p] = true;
    out[p] = trigger_tokens[m];
  }
  return out;
}

PoisonedTokens poison_text_batch(const TokenBatch& batch, std::span<const int> labels,
                                 const PoisonSpec& spec,
                                 std::span<const std::uint32_t> trigger_tokens,
                                 std::span<const std::size_t> positions, Rng& rng) {
  check_ratio(spec);
  PoisonedTokens out{batch, std::vector<int>(labels.begin(), labels.end()), {}, false};
  const std::size_t rows = batch.rows();
  const std::size_t count = std::min(spec.rows_for(rows), rows);
  if (count == 0) {
    out.nothing_poisoned = true;
    return out;
  }
  out.poisoned_rows = sample_rows(rows, count, rng);
  for (auto r : out.poisoned_rows) {
    auto replaced = poison_text_sequence(batch.row(r), trigger_tokens, positions);
    std::copy(replaced.begin(), replaced.end(),
              out.inputs.tokens.begin() + static_cast<std::ptrdiff_t>(r * batch.seq_len));
    out.labels[r] = spec.target_label;
  }
  return out;
}

TokenBatch apply_text_trigger(const TokenBatch& batch, std::span<const std::uint32_t> trigger_tokens,
                              std::span<const std::size_t> positions) {
  TokenBatch out = batch;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto replaced = poison_text_sequence(batch.row(r), trigger_tokens, positions);
    std::copy(replaced.begin(), replaced.end(),
              out.tokens.begin() + static_cast<std::ptrdiff_t>(r * batch.seq_len));
  }
  return out;
}

}  // namespace edba
