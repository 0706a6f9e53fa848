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

#include <span>
#include <string>

#include "nn/tensor.hpp"

namespace edba {

enum class LossKind { cross_entropy, cosine_pair };

// Non-owning description of the scalar objective. Cross-entropy reads
// `labels`; the cosine-pair loss compares each logit row against the matching
// row of `reference` (the fixed clean logits).
struct LossSpec {
  LossKind kind = LossKind::cross_entropy;
  std::span<const int> labels;
  const Tensor* reference = nullptr;

  static LossSpec cross_entropy(std::span<const int> labels) {
    return {LossKind::cross_entropy, labels, nullptr};
  }
  static LossSpec cosine_pair(const Tensor& reference) {
    return {LossKind::cosine_pair, {}, &reference};
  }
};

struct LossGrad {
  double loss = 0.0;
  Tensor grad_logits;
};

// Mean loss over rows and its gradient with respect to the logits.
LossGrad loss_with_logit_grad(const Tensor& logits, const LossSpec& spec);

double cross_entropy_row(std::span<const double> logits, int label);
void softmax_row(std::span<const double> logits, std::span<double> out);

// dot(a,b)/(|a||b|); throws on a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Cosine similarity of two vectors, or the mean of row-wise similarities for
// two equally shaped batches.
double cosine_loss(const Tensor& a, const Tensor& b);

}  // namespace edba
