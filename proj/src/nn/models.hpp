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
#include <string>
#include <variant>
#include <vector>

#include "nn/dense.hpp"
#include "nn/loss.hpp"
#include "nn/params.hpp"
#include "nn/tensor.hpp"

namespace edba {

// Fully connected classifier over flat real inputs.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(std::vector<std::size_t> widths, Activation activation);

  static MlpModel create(std::vector<std::size_t> widths, Activation activation,
                         std::uint64_t seed);

  std::size_t input_dim() const { return stack_.input_dim(); }
  std::size_t classes() const { return stack_.output_dim(); }
  const DenseStack& stack() const { return stack_; }

  FlatParams& params() { return params_; }
  const FlatParams& params() const { return params_; }
  void set_params(FlatParams p);

  // Architecture tag stored in checkpoints, e.g. "mlp:relu:16,64,64,10".
  std::string architecture() const;

 private:
  DenseStack stack_;
  FlatParams params_;
};

// Token sequences of equal length packed row-major.
struct TokenBatch {
  std::size_t seq_len = 0;
  std::vector<std::uint32_t> tokens;

  std::size_t rows() const { return seq_len == 0 ? 0 : tokens.size() / seq_len; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {tokens.data() + r * seq_len, seq_len};
  }
};

// Embedding table, mean pooling over tokens, dense head.
class SeqModel {
 public:
  SeqModel() = default;
  SeqModel(std::size_t vocab, std::size_t embed_dim, std::vector<std::size_t> hidden,
           std::size_t classes, Activation activation);

  static SeqModel create(std::size_t vocab, std::size_t embed_dim,
                         std::vector<std::size_t> hidden, std::size_t classes,
                         Activation activation, std::uint64_t seed);

  std::size_t vocab() const { return vocab_; }
  std::size_t embed_dim() const { return embed_dim_; }
  std::size_t classes() const { return head_.output_dim(); }
  const DenseStack& head() const { return head_; }

  FlatParams& params() { return params_; }
  const FlatParams& params() const { return params_; }
  void set_params(FlatParams p);

  std::string architecture() const;

 private:
  std::size_t vocab_ = 0;
  std::size_t embed_dim_ = 0;
  DenseStack head_;
  FlatParams params_;
};

struct ParamGrad {
  double loss = 0.0;
  FlatParams grad;
};

Tensor forward(const MlpModel& model, const Tensor& batch);
double evaluate_loss(const MlpModel& model, const Tensor& batch, const LossSpec& spec);
ParamGrad loss_and_grad(const MlpModel& model, const Tensor& batch, const LossSpec& spec);
FlatParams grad_params(const MlpModel& model, const Tensor& batch, const LossSpec& spec);
Tensor grad_input(const MlpModel& model, const Tensor& batch, const LossSpec& spec);
// Input gradient for an arbitrary upstream gradient on the logits.
Tensor backprop_to_input(const MlpModel& model, const Tensor& batch, const Tensor& grad_logits);

// Mean-pooled embeddings, shape (rows, embed_dim).
Tensor pooled_embeddings(const SeqModel& model, const TokenBatch& batch);
Tensor forward(const SeqModel& model, const TokenBatch& batch);
double evaluate_loss(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec);
ParamGrad loss_and_grad(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec);
FlatParams grad_params(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec);
// Gradient with respect to the pooled representation (the head's input).
Tensor grad_pooled(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec);

// Index of the largest logit per row; ties resolve to the lowest class.
std::vector<int> argmax_rows(const Tensor& logits);

}  // namespace edba

namespace edba {

struct Checkpoint;
using AnyModel = std::variant<MlpModel, SeqModel>;

// Rebuilds the model named by a checkpoint's architecture tag and installs
// its parameters; the layouts must agree exactly.
AnyModel restore_model(const Checkpoint& ckpt);

}  // namespace edba
