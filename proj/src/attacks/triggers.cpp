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

#include "attacks/triggers.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "data/poison.hpp"
#include "nn/loss.hpp"

namespace edba {

namespace {

Tensor composite(const Tensor& batch, const Tensor& trigger, bool clip) {
  if (clip) return apply_vision_trigger(batch, trigger);
  Tensor out = batch;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] += trigger.data[k];
  }
  return out;
}

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void project(Tensor& t, const std::optional<double>& bound) {
  if (!bound) return;
  for (double& v : t.data) v = std::clamp(v, -*bound, *bound);
}

}  // namespace

CosineObjective trigger_cosine_objective(const MlpModel& model, const Tensor& batch,
                                         const Tensor& clean_logits, const Tensor& trigger,
                                         bool clip_inputs) {
  require(trigger.size() == batch.cols(), ErrorCode::shape_mismatch,
          "trigger shape " + trigger.shape_string() + " does not match input width " +
              std::to_string(batch.cols()));
  const Tensor z = composite(batch, trigger, clip_inputs);
  const Tensor logits = forward(model, z);
  const std::size_t rows = logits.rows(), k = logits.cols();
  CosineObjective out;
  out.grad = Tensor(trigger.shape);
  std::vector<char> valid(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    valid[r] = sq_norm(logits.row(r)) > 0.0 && sq_norm(clean_logits.row(r)) > 0.0;
    if (valid[r]) ++out.valid_rows;
  }
  out.skipped_rows = rows - out.valid_rows;
  if (out.valid_rows == 0) return out;
  const double inv = 1.0 / static_cast<double>(out.valid_rows);
  Tensor dlogits({rows, k});
  for (std::size_t r = 0; r < rows; ++r) {
    if (!valid[r]) continue;
    auto a = logits.row(r);
    auto b = clean_logits.row(r);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    const double na = std::sqrt(aa), nb = std::sqrt(bb);
    const double c = ab / (na * nb);
    out.value += c * inv;
    auto g = dlogits.row(r);
    for (std::size_t i = 0; i < k; ++i) g[i] = inv * (b[i] / (na * nb) - c * a[i] / aa);
  }
  const Tensor dz = backprop_to_input(model, z, dlogits);
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = batch.row(r);
    auto g = dz.row(r);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double s = x[j] + trigger.data[j];
      if (clip_inputs && (s < 0.0 || s > 1.0)) continue;
      out.grad.data[j] += g[j];
    }
  }
  return out;
}

double mean_trigger_cosine(const MlpModel& model, const Tensor& batch, const Tensor& trigger,
                           bool clip_inputs) {
  return trigger_cosine_objective(model, batch, forward(model, batch), trigger, clip_inputs)
      .value;
}

TriggerOptResult optimize_vision_trigger(const MlpModel& model,
                                         std::span<const Tensor> clean_batches, Tensor initial,
                                         const TriggerOptConfig& cfg) {
  require(cfg.step_size > 0.0, ErrorCode::invalid_argument, "trigger step size must be positive");
  require(cfg.epochs >= 1, ErrorCode::invalid_argument, "trigger epochs must be >= 1");
  require(initial.size() == model.input_dim(), ErrorCode::shape_mismatch,
          "initial trigger does not match model input");
  TriggerOptResult res;
  res.trigger = std::move(initial);
  std::vector<Tensor> clean_logits;
  clean_logits.reserve(clean_batches.size());
  for (const auto& b : clean_batches) clean_logits.push_back(forward(model, b));

  auto step = [&](const Tensor& from, const Tensor& grad, double alpha) {
    Tensor t = from;
    for (std::size_t j = 0; j < t.size(); ++j) t.data[j] -= alpha * grad.data[j];
    project(t, cfg.linf_bound);
    return t;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t b = 0; b < clean_batches.size(); ++b) {
      const auto& x = clean_batches[b];
      auto obj = trigger_cosine_objective(model, x, clean_logits[b], res.trigger, cfg.clip_inputs);
      if (epoch == 0) res.skipped_samples += obj.skipped_rows;
      if (obj.valid_rows == 0) continue;
      Tensor next = step(res.trigger, obj.grad, cfg.step_size);
      double after = trigger_cosine_objective(model, x, clean_logits[b], next, cfg.clip_inputs).value;
      if (cfg.backtracking && after > obj.value) {
        next = step(res.trigger, obj.grad, 0.5 * cfg.step_size);
        after = trigger_cosine_objective(model, x, clean_logits[b], next, cfg.clip_inputs).value;
      }
      res.trigger = std::move(next);
      res.loss_trace.push_back(after);
    }
  }
  require(res.trigger.all_finite(), ErrorCode::numeric, "trigger optimisation diverged");
  return res;
}

bool should_refresh(const Tensor& t_new, const Tensor& t_old, double eps_abs) {
  require(t_new.shape == t_old.shape, ErrorCode::shape_mismatch, "should_refresh: shape mismatch");
  return l2_distance(t_new.data, t_old.data) >= eps_abs;
}

double refresh_threshold(const Tensor& t_new, double fraction) {
  return fraction * l2_norm(t_new.data);
}

namespace {

// Cosine with a single square root so identical vectors give exactly 1.
double score_cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  require(aa > 0.0 && bb > 0.0, ErrorCode::numeric, "zero prediction vector in position scoring");
  return ab / std::sqrt(aa * bb);
}

Tensor prediction_scores(const SeqModel& model, const TokenBatch& batch, ScoreSpace space) {
  Tensor logits = forward(model, batch);
  if (space == ScoreSpace::logits) return logits;
  Tensor probs(logits.shape);
  for (std::size_t r = 0; r < logits.rows(); ++r) softmax_row(logits.row(r), probs.row(r));
  return probs;
}

}  // namespace

std::vector<PositionScore> position_scores(const SeqModel& model,
                                           std::span<const std::uint32_t> seq,
                                           std::uint32_t placeholder, std::size_t candidates,
                                           ScoreSpace space) {
  require(candidates <= seq.size(), ErrorCode::invalid_argument,
          "candidate count exceeds sequence length");
  require(placeholder < model.vocab(), ErrorCode::invalid_argument,
          "placeholder id outside vocabulary");
  // Row 0 is the original sequence, row 1+i has the placeholder at i.
  TokenBatch batch;
  batch.seq_len = seq.size();
  batch.tokens.reserve((candidates + 1) * seq.size());
  batch.tokens.insert(batch.tokens.end(), seq.begin(), seq.end());
  for (std::size_t i = 0; i < candidates; ++i) {
    batch.tokens.insert(batch.tokens.end(), seq.begin(), seq.end());
    batch.tokens[(i + 1) * seq.size() + i] = placeholder;
  }
  const Tensor f = prediction_scores(model, batch, space);
  std::vector<PositionScore> out(candidates);
  for (std::size_t i = 0; i < candidates; ++i)
    out[i] = {i, 1.0 - score_cosine(f.row(0), f.row(i + 1))};
  return out;
}

std::vector<PositionScore> mean_position_scores(const SeqModel& model, const TextDataset& data,
                                                std::size_t candidates, ScoreSpace space) {
  std::vector<PositionScore> mean(candidates);
  for (std::size_t i = 0; i < candidates; ++i) mean[i].position = i;
  if (data.size() == 0) return mean;
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto s = position_scores(model, data.sequences.row(r), data.vocab.placeholder, candidates, space);
    for (std::size_t i = 0; i < candidates; ++i) mean[i].score += s[i].score;
  }
  for (auto& m : mean) m.score /= static_cast<double>(data.size());
  return mean;
}

std::vector<std::size_t> select_positions(std::span<const PositionScore> scores, std::size_t count) {
  require(count <= scores.size(), ErrorCode::invalid_argument,
          "cannot select more positions than were scored");
  std::vector<PositionScore> sorted(scores.begin(), scores.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
  });
  std::vector<std::size_t> out(count);
  for (std::size_t m = 0; m < count; ++m) out[m] = sorted[m].position;
  return out;
}

}  // namespace edba
