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

#include "data/datasets.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace edba {

Tensor VisionDataset::gather(std::span<const std::size_t> rows) const {
  const std::size_t d = dim();
  Tensor out({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = inputs.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::vector<int> VisionDataset::gather_labels(std::span<const std::size_t> rows) const {
  std::vector<int> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = labels[rows[r]];
  return out;
}

VisionDataset VisionDataset::subset(std::span<const std::size_t> rows) const {
  return {gather(rows), gather_labels(rows), classes};
}

TextVocab TextVocab::standard(std::size_t vocab, std::size_t classes) {
  TextVocab v;
  v.vocab = vocab;
  v.classes = classes;
  v.indicative_begin = static_cast<std::uint32_t>(v.rare_begin + v.rare_count);
  v.neutral_begin = static_cast<std::uint32_t>(v.indicative_begin + classes * v.per_class);
  require(classes >= 2, ErrorCode::invalid_argument, "text task needs at least 2 classes");
  require(vocab >= v.neutral_begin + 4, ErrorCode::invalid_argument,
          "vocabulary of " + std::to_string(vocab) + " too small for " +
              std::to_string(classes) + " classes (need " +
              std::to_string(v.neutral_begin + 4) + ")");
  return v;
}

int TextVocab::token_class(std::uint32_t tok) const {
  if (tok < indicative_begin || tok >= neutral_begin) return -1;
  return static_cast<int>((tok - indicative_begin) / per_class);
}

std::vector<std::uint32_t> TextVocab::rare_tokens() const {
  std::vector<std::uint32_t> out(rare_count);
  std::iota(out.begin(), out.end(), rare_begin);
  return out;
}

TokenBatch TextDataset::gather(std::span<const std::size_t> rows) const {
  TokenBatch out;
  out.seq_len = seq_len();
  out.tokens.reserve(rows.size() * out.seq_len);
  for (auto r : rows) {
    auto s = sequences.row(r);
    out.tokens.insert(out.tokens.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<int> TextDataset::gather_labels(std::span<const std::size_t> rows) const {
  std::vector<int> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = labels[rows[r]];
  return out;
}

TextDataset TextDataset::subset(std::span<const std::size_t> rows) const {
  return {vocab, gather(rows), gather_labels(rows)};
}

namespace {

std::vector<int> balanced_labels(std::size_t n, std::size_t classes, Rng& rng) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
  shuffle_range(labels.begin(), labels.end(), rng);
  return labels;
}

}  // namespace

VisionDataset make_vision_dataset(std::uint64_t seed, std::size_t n, std::size_t dim,
                                  std::size_t classes, double cluster_spread) {
  require(classes >= 2, ErrorCode::invalid_argument, "vision task needs K >= 2");
  require(dim >= 4, ErrorCode::invalid_argument, "vision task needs d >= 4");
  require(cluster_spread > 0.0, ErrorCode::invalid_argument,
          "cluster_spread must be positive");
  Rng rng(seed);
  std::vector<double> centres(classes * dim);
  for (auto& c : centres) c = 0.15 + 0.7 * uniform01(rng);
  VisionDataset ds;
  ds.classes = classes;
  ds.labels = balanced_labels(n, classes, rng);
  ds.inputs = Tensor({n, dim});
  for (std::size_t i = 0; i < n; ++i) {
    const double* c = centres.data() + static_cast<std::size_t>(ds.labels[i]) * dim;
    auto row = ds.inputs.row(i);
    for (std::size_t k = 0; k < dim; ++k)
      row[k] = std::clamp(c[k] + cluster_spread * standard_normal(rng), 0.0, 1.0);
  }
  return ds;
}

int majority_label(std::span<const std::uint32_t> seq, const TextVocab& vocab) {
  std::vector<std::size_t> counts(vocab.classes, 0);
  for (auto t : seq) {
    int c = vocab.token_class(t);
    if (c >= 0) ++counts[static_cast<std::size_t>(c)];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

TextDataset make_text_dataset(std::uint64_t seed, std::size_t n, std::size_t seq_len,
                              std::size_t vocab, std::size_t classes) {
  require(seq_len >= 6, ErrorCode::invalid_argument, "text sequences need length >= 6");
  TextDataset ds;
  ds.vocab = TextVocab::standard(vocab, classes);
  const auto& v = ds.vocab;
  Rng rng(seed);
  auto intended = balanced_labels(n, classes, rng);
  ds.sequences.seq_len = seq_len;
  ds.sequences.tokens.reserve(n * seq_len);
  ds.labels.reserve(n);
  const std::size_t neutral_count = vocab - v.neutral_begin;
  std::vector<std::uint32_t> seq(seq_len);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(intended[i]);
    const std::size_t major = 3 + uniform_index(rng, 3);
    const std::size_t minor = uniform_index(rng, major - 1);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < major; ++k)
      seq[pos++] = static_cast<std::uint32_t>(v.indicative_begin + y * v.per_class +
                                              uniform_index(rng, v.per_class));
    for (std::size_t k = 0; k < minor; ++k) {
      std::size_t other = (y + 1 + uniform_index(rng, classes - 1)) % classes;
      seq[pos++] = static_cast<std::uint32_t>(v.indicative_begin + other * v.per_class +
                                              uniform_index(rng, v.per_class));
    }
    while (pos < seq_len)
      seq[pos++] = static_cast<std::uint32_t>(v.neutral_begin + uniform_index(rng, neutral_count));
    shuffle_range(seq.begin(), seq.end(), rng);
    const int label = majority_label(seq, v);
    require(label == intended[i], ErrorCode::internal, "text generator broke majority rule");
    ds.sequences.tokens.insert(ds.sequences.tokens.end(), seq.begin(), seq.end());
    ds.labels.push_back(label);
  }
  return ds;
}

namespace {

std::vector<std::size_t> iota_range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> v(end - begin);
  std::iota(v.begin(), v.end(), begin);
  return v;
}

}  // namespace

std::pair<VisionDataset, VisionDataset> split_tail(const VisionDataset& ds, std::size_t n_tail) {
  require(n_tail <= ds.size(), ErrorCode::invalid_argument, "split larger than dataset");
  const std::size_t head = ds.size() - n_tail;
  return {ds.subset(iota_range(0, head)), ds.subset(iota_range(head, ds.size()))};
}

std::pair<TextDataset, TextDataset> split_tail(const TextDataset& ds, std::size_t n_tail) {
  require(n_tail <= ds.size(), ErrorCode::invalid_argument, "split larger than dataset");
  const std::size_t head = ds.size() - n_tail;
  return {ds.subset(iota_range(0, head)), ds.subset(iota_range(head, ds.size()))};
}

}  // namespace edba
