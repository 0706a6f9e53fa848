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

#include "nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace edba {

void softmax_row(std::span<const double> logits, std::span<double> out) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - mx);
    sum += out[k];
  }
  for (auto& v : out) v /= sum;
}

double cross_entropy_row(std::span<const double> logits, int label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return std::log(sum) + mx - logits[static_cast<std::size_t>(label)];
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::shape_mismatch, "cosine: length mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  require(aa > 0.0 && bb > 0.0, ErrorCode::numeric,
          "cosine similarity undefined for a zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double cosine_loss(const Tensor& a, const Tensor& b) {
  require(a.shape == b.shape, ErrorCode::shape_mismatch,
          "cosine_loss: shapes " + a.shape_string() + " and " + b.shape_string());
  const std::size_t rows = a.rows();
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) total += cosine_similarity(a.row(r), b.row(r));
  return total / static_cast<double>(rows);
}

LossGrad loss_with_logit_grad(const Tensor& logits, const LossSpec& spec) {
  const std::size_t rows = logits.rows(), k = logits.cols();
  require(rows > 0, ErrorCode::invalid_argument, "loss on an empty batch");
  LossGrad out{0.0, Tensor({rows, k})};
  const double inv = 1.0 / static_cast<double>(rows);
  if (spec.kind == LossKind::cross_entropy) {
    require(spec.labels.size() == rows, ErrorCode::shape_mismatch,
            "label count " + std::to_string(spec.labels.size()) + " vs batch " +
                std::to_string(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      const int y = spec.labels[r];
      require(y >= 0 && static_cast<std::size_t>(y) < k, ErrorCode::invalid_argument,
              "label " + std::to_string(y) + " out of range at batch index " + std::to_string(r));
      const double l = cross_entropy_row(logits.row(r), y);
      require(std::isfinite(l), ErrorCode::numeric,
              "non-finite loss at batch index " + std::to_string(r));
      out.loss += l * inv;
      auto g = out.grad_logits.row(r);
      softmax_row(logits.row(r), g);
      g[static_cast<std::size_t>(y)] -= 1.0;
      for (auto& v : g) v *= inv;
    }
    return out;
  }
  require(spec.reference != nullptr && spec.reference->shape == logits.shape,
          ErrorCode::shape_mismatch, "cosine-pair loss needs reference logits of the same shape");
  for (std::size_t r = 0; r < rows; ++r) {
    auto a = logits.row(r);
    auto b = spec.reference->row(r);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    require(aa > 0.0 && bb > 0.0, ErrorCode::numeric,
            "zero-norm logits at batch index " + std::to_string(r) +
                ": cosine direction undefined");
    const double na = std::sqrt(aa), nb = std::sqrt(bb);
    const double c = ab / (na * nb);
    require(std::isfinite(c), ErrorCode::numeric,
            "non-finite loss at batch index " + std::to_string(r));
    out.loss += c * inv;
    auto g = out.grad_logits.row(r);
    for (std::size_t i = 0; i < k; ++i) g[i] = inv * (b[i] / (na * nb) - c * a[i] / aa);
  }
  return out;
}

}  // namespace edba
