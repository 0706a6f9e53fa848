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

#include "nn/models.hpp"
#include "nn/tensor.hpp"

namespace edba {

// n x d inputs in [0,1] with integer class labels.
struct VisionDataset {
  Tensor inputs;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.cols(); }
  Tensor gather(std::span<const std::size_t> rows) const;
  std::vector<int> gather_labels(std::span<const std::size_t> rows) const;
  VisionDataset subset(std::span<const std::size_t> rows) const;
};

// Token id layout of the synthetic vocabulary:
//   [0]                     placeholder / mask token
//   [1, 1+rare)             rare tokens, never produced by the generator
//   [indicative, +K*per)    class-indicative tokens, `per_class` per class
//   [neutral, vocab)        filler tokens
struct TextVocab {
  std::size_t vocab = 0;
  std::size_t classes = 0;
  std::uint32_t placeholder = 0;
  std::uint32_t rare_begin = 1;
  std::size_t rare_count = 4;
  std::uint32_t indicative_begin = 0;
  std::size_t per_class = 4;
  std::uint32_t neutral_begin = 0;

  static TextVocab standard(std::size_t vocab, std::size_t classes);
  // Class owning an indicative token, or -1.
  int token_class(std::uint32_t tok) const;
  std::vector<std::uint32_t> rare_tokens() const;
};

struct TextDataset {
  TextVocab vocab;
  TokenBatch sequences;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t seq_len() const { return sequences.seq_len; }
  std::size_t classes() const { return vocab.classes; }
  TokenBatch gather(std::span<const std::size_t> rows) const;
  std::vector<int> gather_labels(std::span<const std::size_t> rows) const;
  TextDataset subset(std::span<const std::size_t> rows) const;
};

// K Gaussian clusters (per-coordinate std `cluster_spread`) around centres
// drawn in [0.15, 0.85]^d, clipped to [0,1]. Labels are balanced.
VisionDataset make_vision_dataset(std::uint64_t seed, std::size_t n, std::size_t dim,
                                  std::size_t classes, double cluster_spread);

// Label of a token sequence: class with the most indicative tokens, ties to
// the lowest class, 0 when none are present.
int majority_label(std::span<const std::uint32_t> seq, const TextVocab& vocab);

// Each sequence plants 3-5 tokens of its class plus fewer tokens of other
// classes into neutral filler; labels follow `majority_label`.
TextDataset make_text_dataset(std::uint64_t seed, std::size_t n, std::size_t seq_len,
                              std::size_t vocab, std::size_t classes);

// First `size - n_tail` rows and the remaining tail.
std::pair<VisionDataset, VisionDataset> split_tail(const VisionDataset& ds, std::size_t n_tail);
std::pair<TextDataset, TextDataset> split_tail(const TextDataset& ds, std::size_t n_tail);

}  // namespace edba
