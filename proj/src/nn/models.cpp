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

#include "nn/models.hpp"

#include <charconv>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/checkpoint.hpp"

namespace edba {

namespace {

std::string join_widths(const std::vector<std::size_t>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s;
}

}  // namespace

MlpModel::MlpModel(std::vector<std::size_t> widths, Activation activation) {
  stack_.widths = std::move(widths);
  stack_.activation = activation;
  stack_.add_slots(params_, "dense");
}

MlpModel MlpModel::create(std::vector<std::size_t> widths, Activation activation,
                          std::uint64_t seed) {
  MlpModel m(std::move(widths), activation);
  Rng rng(seed);
  m.stack_.initialise(m.params_.data(), rng);
  return m;
}

void MlpModel::set_params(FlatParams p) {
  require_same_layout(params_, p, "MlpModel::set_params");
  params_ = std::move(p);
}

std::string MlpModel::architecture() const {
  return "mlp:" + to_string(stack_.activation) + ":" + join_widths(stack_.widths);
}

SeqModel::SeqModel(std::size_t vocab, std::size_t embed_dim, std::vector<std::size_t> hidden,
                   std::size_t classes, Activation activation)
    : vocab_(vocab), embed_dim_(embed_dim) {
  require(vocab > 0 && embed_dim > 0, ErrorCode::invalid_argument,
          "sequence model needs positive vocab and embedding sizes");
  params_.add_slot("embedding", {vocab, embed_dim});
  head_.widths.push_back(embed_dim);
  for (auto h : hidden) head_.widths.push_back(h);
  head_.widths.push_back(classes);
  head_.activation = activation;
  head_.add_slots(params_, "head");
}

SeqModel SeqModel::create(std::size_t vocab, std::size_t embed_dim,
                          std::vector<std::size_t> hidden, std::size_t classes,
                          Activation activation, std::uint64_t seed) {
  SeqModel m(vocab, embed_dim, std::move(hidden), classes, activation);
  Rng rng(seed);
  auto emb = m.params_.view(m.params_.slot("embedding"));
  for (double& v : emb) v = standard_normal(rng);
  m.head_.initialise(m.params_.data(), rng);
  return m;
}

void SeqModel::set_params(FlatParams p) {
  require_same_layout(params_, p, "SeqModel::set_params");
  params_ = std::move(p);
}

std::string SeqModel::architecture() const {
  return "seq:" + to_string(head_.activation) + ":" + std::to_string(vocab_) + ":" +
         join_widths(head_.widths);
}

Tensor forward(const MlpModel& model, const Tensor& batch) {
  return dense_forward(model.stack(), model.params().data(), batch, nullptr);
}

double evaluate_loss(const MlpModel& model, const Tensor& batch, const LossSpec& spec) {
  return loss_with_logit_grad(forward(model, batch), spec).loss;
}

ParamGrad loss_and_grad(const MlpModel& model, const Tensor& batch, const LossSpec& spec) {
  DenseTrace trace;
  Tensor logits = dense_forward(model.stack(), model.params().data(), batch, &trace);
  LossGrad lg = loss_with_logit_grad(logits, spec);
  ParamGrad out{lg.loss, model.params().zeros_like()};
  dense_backward(model.stack(), model.params().data(), trace, std::move(lg.grad_logits),
                 out.grad.data(), false);
  return out;
}

FlatParams grad_params(const MlpModel& model, const Tensor& batch, const LossSpec& spec) {
  return loss_and_grad(model, batch, spec).grad;
}

Tensor backprop_to_input(const MlpModel& model, const Tensor& batch, const Tensor& grad_logits) {
  DenseTrace trace;
  dense_forward(model.stack(), model.params().data(), batch, &trace);
  Tensor g = dense_backward(model.stack(), model.params().data(), trace, grad_logits, {}, true);
  g.shape = batch.shape;
  return g;
}

Tensor grad_input(const MlpModel& model, const Tensor& batch, const LossSpec& spec) {
  DenseTrace trace;
  Tensor logits = dense_forward(model.stack(), model.params().data(), batch, &trace);
  LossGrad lg = loss_with_logit_grad(logits, spec);
  Tensor g = dense_backward(model.stack(), model.params().data(), trace,
                            std::move(lg.grad_logits), {}, true);
  g.shape = batch.shape;
  return g;
}

Tensor pooled_embeddings(const SeqModel& model, const TokenBatch& batch) {
  require(batch.seq_len > 0 && batch.tokens.size() % batch.seq_len == 0,
          ErrorCode::shape_mismatch, "token batch is not a whole number of sequences");
  const std::size_t rows = batch.rows(), dim = model.embed_dim();
  const auto emb = model.params().view(model.params().slot("embedding"));
  Tensor pooled({rows, dim});
  const double inv = 1.0 / static_cast<double>(batch.seq_len);
  for (std::size_t r = 0; r < rows; ++r) {
    auto out = pooled.row(r);
    for (auto tok : batch.row(r)) {
      require(tok < model.vocab(), ErrorCode::invalid_argument,
              "token id " + std::to_string(tok) + " outside vocabulary at sequence " +
                  std::to_string(r));
      const double* e = emb.data() + static_cast<std::size_t>(tok) * dim;
      for (std::size_t k = 0; k < dim; ++k) out[k] += e[k];
    }
    for (auto& v : out) v *= inv;
  }
  return pooled;
}

Tensor forward(const SeqModel& model, const TokenBatch& batch) {
  return dense_forward(model.head(), model.params().data(), pooled_embeddings(model, batch),
                       nullptr);
}

double evaluate_loss(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec) {
  return loss_with_logit_grad(forward(model, batch), spec).loss;
}

ParamGrad loss_and_grad(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec) {
  Tensor pooled = pooled_embeddings(model, batch);
  DenseTrace trace;
  Tensor logits = dense_forward(model.head(), model.params().data(), pooled, &trace);
  LossGrad lg = loss_with_logit_grad(logits, spec);
  ParamGrad out{lg.loss, model.params().zeros_like()};
  Tensor gp = dense_backward(model.head(), model.params().data(), trace,
                             std::move(lg.grad_logits), out.grad.data(), true);
  // Scatter the pooled gradient back onto the embedding rows.
  const std::size_t dim = model.embed_dim();
  auto gemb = out.grad.view(out.grad.slot("embedding"));
  const double inv = 1.0 / static_cast<double>(batch.seq_len);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    auto g = gp.row(r);
    for (auto tok : batch.row(r)) {
      double* e = gemb.data() + static_cast<std::size_t>(tok) * dim;
      for (std::size_t k = 0; k < dim; ++k) e[k] += g[k] * inv;
    }
  }
  return out;
}

FlatParams grad_params(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec) {
  return loss_and_grad(model, batch, spec).grad;
}

Tensor grad_pooled(const SeqModel& model, const TokenBatch& batch, const LossSpec& spec) {
  Tensor pooled = pooled_embeddings(model, batch);
  DenseTrace trace;
  Tensor logits = dense_forward(model.head(), model.params().data(), pooled, &trace);
  LossGrad lg = loss_with_logit_grad(logits, spec);
  return dense_backward(model.head(), model.params().data(), trace, std::move(lg.grad_logits),
                        {}, true);
}

std::vector<int> argmax_rows(const Tensor& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[best]) best = k;
    out[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace edba

namespace edba {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = s.find(sep, begin);
    out.push_back(s.substr(begin, pos == std::string::npos ? pos : pos - begin));
    if (pos == std::string::npos) return out;
    begin = pos + 1;
  }
}

std::size_t parse_size(const std::string& s, const std::string& arch) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty(),
          ErrorCode::invalid_argument, "malformed architecture tag: " + arch);
  return v;
}

std::vector<std::size_t> parse_widths(const std::string& s, const std::string& arch) {
  std::vector<std::size_t> w;
  for (const auto& part : split_on(s, ',')) w.push_back(parse_size(part, arch));
  return w;
}

}  // namespace

AnyModel restore_model(const Checkpoint& ckpt) {
  const auto& arch = ckpt.architecture;
  const auto parts = split_on(arch, ':');
  if (parts.size() == 3 && parts[0] == "mlp") {
    MlpModel m(parse_widths(parts[2], arch), parse_activation(parts[1]));
    m.set_params(ckpt.params);
    return m;
  }
  if (parts.size() == 4 && parts[0] == "seq") {
    auto widths = parse_widths(parts[3], arch);
    require(widths.size() >= 2, ErrorCode::invalid_argument, "malformed architecture tag: " + arch);
    const auto embed = widths.front();
    const auto classes = widths.back();
    std::vector<std::size_t> hidden(widths.begin() + 1, widths.end() - 1);
    SeqModel m(parse_size(parts[2], arch), embed, hidden, classes, parse_activation(parts[1]));
    m.set_params(ckpt.params);
    return m;
  }
  fail(ErrorCode::invalid_argument, "unknown architecture tag: " + arch);
}

}  // namespace edba
