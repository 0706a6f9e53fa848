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

#include "nn/dense.hpp"

#include <cmath>

#include "common/error.hpp"

namespace edba {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  fail(ErrorCode::invalid_argument, "unknown activation: " + std::string(s));
}

std::size_t DenseStack::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers(); ++l) n += widths[l + 1] * (widths[l] + 1);
  return n;
}

void DenseStack::add_slots(FlatParams& params, const std::string& prefix) {
  require(widths.size() >= 2, ErrorCode::invalid_argument, "dense stack needs at least two widths");
  for (auto w : widths) require(w > 0, ErrorCode::invalid_argument, "zero layer width");
  offset = params.size();
  for (std::size_t l = 0; l < layers(); ++l) {
    params.add_slot(prefix + std::to_string(l) + ".weight", {widths[l + 1], widths[l]});
    params.add_slot(prefix + std::to_string(l) + ".bias", {widths[l + 1]});
  }
}

void DenseStack::initialise(std::span<double> params, Rng& rng) const {
  std::size_t pos = offset;
  for (std::size_t l = 0; l < layers(); ++l) {
    std::size_t in = widths[l], out = widths[l + 1];
    double scale = activation == Activation::relu ? std::sqrt(2.0 / in) : std::sqrt(1.0 / in);
    for (std::size_t k = 0; k < in * out; ++k) params[pos + k] = scale * standard_normal(rng);
    pos += in * out;
    for (std::size_t k = 0; k < out; ++k) params[pos + k] = 0.0;
    pos += out;
  }
}

namespace {

void activate(Activation act, const Tensor& pre, Tensor& post) {
  post = pre;
  if (act == Activation::relu) {
    for (double& v : post.data) v = v > 0.0 ? v : 0.0;
  } else {
    for (double& v : post.data) v = std::tanh(v);
  }
}

}  // namespace

Tensor dense_forward(const DenseStack& stack, std::span<const double> params,
                     const Tensor& input, DenseTrace* trace) {
  require(input.cols() == stack.input_dim() && (input.shape.size() == 2 || input.shape.size() == 1),
          ErrorCode::shape_mismatch,
          "input shape " + input.shape_string() + " does not match model input dimension " +
              std::to_string(stack.input_dim()));
  const std::size_t rows = input.rows();
  Tensor x = input.shape.size() == 2 ? input : Tensor({1, input.cols()}, input.data);
  if (trace) {
    trace->pre.clear();
    trace->post.clear();
    trace->post.push_back(x);
  }
  std::size_t pos = stack.offset;
  for (std::size_t l = 0; l < stack.layers(); ++l) {
    const std::size_t in = stack.widths[l], out = stack.widths[l + 1];
    const double* w = params.data() + pos;
    const double* b = w + in * out;
    pos += in * out + out;
    Tensor pre({rows, out});
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x.data.data() + r * in;
      double* yr = pre.data.data() + r * out;
      for (std::size_t o = 0; o < out; ++o) {
        const double* wo = w + o * in;
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xr[i];
        yr[o] = acc;
      }
    }
    const bool last = l + 1 == stack.layers();
    if (last) {
      if (trace) trace->pre.push_back(pre);
      return pre;
    }
    Tensor post;
    activate(stack.activation, pre, post);
    if (trace) {
      trace->pre.push_back(std::move(pre));
      trace->post.push_back(post);
    }
    x = std::move(post);
  }
  return x;  // unreachable for layers() >= 1
}

Tensor dense_backward(const DenseStack& stack, std::span<const double> params,
                      const DenseTrace& trace, Tensor grad_output,
                      std::span<double> param_grad, bool want_input) {
  const std::size_t rows = trace.post.front().rows();
  // Offsets of each layer inside the flat vector.
  std::vector<std::size_t> offs(stack.layers());
  std::size_t pos = stack.offset;
  for (std::size_t l = 0; l < stack.layers(); ++l) {
    offs[l] = pos;
    pos += stack.widths[l] * stack.widths[l + 1] + stack.widths[l + 1];
  }
  Tensor delta = std::move(grad_output);  // dL/d(pre) of the current layer
  for (std::size_t li = stack.layers(); li-- > 0;) {
    const std::size_t in = stack.widths[li], out = stack.widths[li + 1];
    const double* w = params.data() + offs[li];
    const Tensor& x = trace.post[li];
    if (!param_grad.empty()) {
      double* gw = param_grad.data() + offs[li];
      double* gb = gw + in * out;
      for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.data.data() + r * in;
        const double* dr = delta.data.data() + r * out;
        for (std::size_t o = 0; o < out; ++o) {
          const double d = dr[o];
          gb[o] += d;
          double* gwo = gw + o * in;
          for (std::size_t i = 0; i < in; ++i) gwo[i] += d * xr[i];
        }
      }
    }
    if (li == 0 && !want_input) return {};
    Tensor dx({rows, in});
    for (std::size_t r = 0; r < rows; ++r) {
      const double* dr = delta.data.data() + r * out;
      double* dxr = dx.data.data() + r * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = dr[o];
        const double* wo = w + o * in;
        for (std::size_t i = 0; i < in; ++i) dxr[i] += d * wo[i];
      }
    }
    if (li == 0) return dx;
    // Through the activation of layer li-1.
    const Tensor& pre = trace.pre[li - 1];
    const Tensor& post = trace.post[li];
    if (stack.activation == Activation::relu) {
      for (std::size_t k = 0; k < dx.data.size(); ++k)
        if (!(pre.data[k] > 0.0)) dx.data[k] = 0.0;
    } else {
      for (std::size_t k = 0; k < dx.data.size(); ++k)
        dx.data[k] *= 1.0 - post.data[k] * post.data[k];
    }
    delta = std::move(dx);
  }
  return {};
}

}  // namespace edba
