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

// Finite-difference gradient checks shared by the unit tests and the
// acceptance binary.

#include <cstdint>
#include <vector>

#include "common/rng.hpp"
#include "nn/loss.hpp"
#include "nn/models.hpp"
#include "oracles.hpp"

namespace edba::gradcheck {

inline constexpr double kH = 1e-4;
inline constexpr double kRtol = 1e-3;

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = lo + (hi - lo) * uniform01(rng);
  return t;
}

// Biases start at zero after initialisation; spread every parameter so the
// checks exercise them.
inline void randomise(FlatParams& p, Rng& rng) {
  for (auto& v : p.data()) v = 0.7 * standard_normal(rng);
}

// Sign pattern of every hidden pre-activation, used to skip finite-difference
// probes that straddle a ReLU kink.
inline std::vector<char> relu_pattern(const DenseStack& stack, std::span<const double> params,
                               const Tensor& input) {
  DenseTrace trace;
  dense_forward(stack, params, input, &trace);
  std::vector<char> pat;
  for (std::size_t l = 0; l + 1 < trace.pre.size(); ++l)
    for (double v : trace.pre[l].data) pat.push_back(v > 0.0);
  return pat;
}

struct FdStats {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
};

inline LossSpec make_spec(bool cosine, const std::vector<int>& labels, const Tensor& reference) {
  return cosine ? LossSpec::cosine_pair(reference) : LossSpec::cross_entropy(labels);
}

// Checks parameter and input gradients of one seeded MLP instance.
inline void check_mlp_instance(std::uint64_t seed, Activation act, bool cosine, FdStats& st) {
  Rng rng(seed);
  const std::size_t in = 2 + seed % 5, h1 = 3 + seed % 4, h2 = 2 + seed % 3, k = 2 + seed % 4;
  const std::size_t rows = 1 + seed % 3;
  MlpModel model = MlpModel::create({in, h1, h2, k}, act, seed);
  randomise(model.params(), rng);
  Tensor x = random_tensor({rows, in}, rng);
  std::vector<int> labels(rows);
  for (auto& y : labels) y = static_cast<int>(uniform_index(rng, k));
  Tensor reference = random_tensor({rows, k}, rng);
  const LossSpec spec = make_spec(cosine, labels, reference);

  const FlatParams g = grad_params(model, x, spec);
  const auto base_pat = relu_pattern(model.stack(), model.params().data(), x);
  auto loss_at_params = [&](const std::vector<double>& p) {
    MlpModel m = model;
    m.params().data() = p;
    return evaluate_loss(m, x, spec);
  };
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    if (act == Activation::relu) {
      auto p = model.params().data();
      bool kink = false;
      for (double s : {kH, -kH}) {
        p[i] = model.params().data()[i] + s;
        kink |= relu_pattern(model.stack(), p, x) != base_pat;
      }
      if (kink) {
        ++st.skipped;
        continue;
      }
    }
    const double fd = oracle::central_difference(loss_at_params, model.params().data(), i, kH);
    ++st.checked;
    if (!oracle::close_relative(g.data()[i], fd, kRtol)) ++st.failures;
  }

  const Tensor gx = grad_input(model, x, spec);
  auto loss_at_input = [&](const std::vector<double>& v) {
    Tensor xx = x;
    xx.data = v;
    return evaluate_loss(model, xx, spec);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (act == Activation::relu) {
      bool kink = false;
      for (double s : {kH, -kH}) {
        Tensor xx = x;
        xx.data[i] += s;
        kink |= relu_pattern(model.stack(), model.params().data(), xx) != base_pat;
      }
      if (kink) {
        ++st.skipped;
        continue;
      }
    }
    const double fd = oracle::central_difference(loss_at_input, x.data, i, kH);
    ++st.checked;
    if (!oracle::close_relative(gx.data[i], fd, kRtol)) ++st.failures;
  }
}

inline TokenBatch random_tokens(std::size_t rows, std::size_t len, std::size_t vocab, Rng& rng) {
  TokenBatch b;
  b.seq_len = len;
  for (std::size_t i = 0; i < rows * len; ++i)
    b.tokens.push_back(static_cast<std::uint32_t>(uniform_index(rng, vocab)));
  return b;
}

inline void check_seq_instance(std::uint64_t seed, bool cosine, FdStats& st) {
  Rng rng(seed);
  const std::size_t vocab = 5 + seed % 4, embed = 2 + seed % 3, k = 2 + seed % 3;
  const std::size_t rows = 1 + seed % 3, len = 2 + seed % 4;
  // tanh head: the embedding path has no kinks, so every coordinate is probed.
  SeqModel model = SeqModel::create(vocab, embed, {4}, k, Activation::tanh, seed);
  randomise(model.params(), rng);
  TokenBatch x = random_tokens(rows, len, vocab, rng);
  std::vector<int> labels(rows);
  for (auto& y : labels) y = static_cast<int>(uniform_index(rng, k));
  Tensor reference = random_tensor({rows, k}, rng);
  const LossSpec spec = make_spec(cosine, labels, reference);

  const FlatParams g = grad_params(model, x, spec);
  auto loss_at_params = [&](const std::vector<double>& p) {
    SeqModel m = model;
    m.params().data() = p;
    return evaluate_loss(m, x, spec);
  };
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const double fd = oracle::central_difference(loss_at_params, model.params().data(), i, kH);
    ++st.checked;
    if (!oracle::close_relative(g.data()[i], fd, kRtol)) ++st.failures;
  }

  // The head's input is the pooled embedding; probe it directly.
  const Tensor pooled = pooled_embeddings(model, x);
  const Tensor gp = grad_pooled(model, x, spec);
  auto loss_at_pooled = [&](const std::vector<double>& v) {
    Tensor p = pooled;
    p.data = v;
    Tensor logits = dense_forward(model.head(), model.params().data(), p, nullptr);
    return loss_with_logit_grad(logits, spec).loss;
  };
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double fd = oracle::central_difference(loss_at_pooled, pooled.data, i, kH);
    ++st.checked;
    if (!oracle::close_relative(gp.data[i], fd, kRtol)) ++st.failures;
  }
}

}  // namespace edba::gradcheck
