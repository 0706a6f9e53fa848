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
#include <vector>

#include "common/rng.hpp"
#include "nn/params.hpp"
#include "nn/tensor.hpp"

namespace edba {

enum class Activation { relu, tanh };

std::string to_string(Activation a);
Activation parse_activation(std::string_view s);

// A stack of fully connected layers living at `offset` inside a FlatParams
// vector. Hidden layers apply `activation`; the last layer is linear.
// Layer l stores weight (widths[l+1] x widths[l]) then bias (widths[l+1]).
struct DenseStack {
  std::vector<std::size_t> widths;
  Activation activation = Activation::relu;
  std::size_t offset = 0;

  std::size_t layers() const { return widths.size() - 1; }
  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  std::size_t param_count() const;

  // Registers "<prefix><l>.weight" / "<prefix><l>.bias" slots and sets offset.
  void add_slots(FlatParams& params, const std::string& prefix);
  // He-style initialisation for weights, zero biases.
  void initialise(std::span<double> params, Rng& rng) const;
};

// Activations kept for backprop; post[0] is the input.
struct DenseTrace {
  std::vector<Tensor> pre;
  std::vector<Tensor> post;
};

Tensor dense_forward(const DenseStack& stack, std::span<const double> params,
                     const Tensor& input, DenseTrace* trace);

// Backpropagates dL/d(output). Parameter gradients are accumulated into
// `param_grad` (full FlatParams vector, may be empty to skip). Returns
// dL/d(input) when `want_input` is set, otherwise an empty tensor.
Tensor dense_backward(const DenseStack& stack, std::span<const double> params,
                      const DenseTrace& trace, Tensor grad_output,
                      std::span<double> param_grad, bool want_input);

}  // namespace edba
