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
#include <optional>
#include <span>
#include <vector>

#include "data/datasets.hpp"
#include "nn/models.hpp"
#include "nn/tensor.hpp"

namespace edba {

// Additive input-space trigger; `version` counts accepted refreshes.
struct VisionTrigger {
  Tensor pattern;
  std::uint64_t version = 0;
};

// Token-replacement trigger: tokens[m] is written at positions[m].
struct TextTrigger {
  std::vector<std::uint32_t> tokens;
  std::vector<std::size_t> positions;
  std::uint64_t version = 0;
};

struct TriggerOptConfig {
  double step_size = 0.05;
  int epochs = 20;
  // Refresh threshold as a fraction of the candidate trigger's L2 norm.
  double refresh_fraction = 0.1;
  std::optional<double> linf_bound;
  // Optimise through clip(x + T, 0, 1), the composite actually injected.
  bool clip_inputs = true;
  // Retry a loss-increasing step once at half the step size.
  bool backtracking = true;
};

struct TriggerOptResult {
  Tensor trigger;
  std::vector<double> loss_trace;  // mean cosine similarity after each step
  std::size_t skipped_samples = 0;
};

// Mean over rows of cos(f(x + T), clean_logits) and its gradient in T.
// Rows whose clean or poisoned logits vanish are excluded and counted.
struct CosineObjective {
  double value = 0.0;
  Tensor grad;
  std::size_t valid_rows = 0;
  std::size_t skipped_rows = 0;
};

CosineObjective trigger_cosine_objective(const MlpModel& model, const Tensor& batch,
                                         const Tensor& clean_logits, const Tensor& trigger,
                                         bool clip_inputs);

// Gradient descent on the cosine similarity between triggered and clean
// logits: T <- T - step * grad_T cos(f(x + T), f(x)), over `epochs` passes of
// `clean_batches`. The model is only read.
TriggerOptResult optimize_vision_trigger(const MlpModel& model,
                                         std::span<const Tensor> clean_batches,
                                         Tensor initial, const TriggerOptConfig& cfg);

// Mean cosine(f(clip(x+T)), f(x)) over a batch, skipping degenerate rows.
double mean_trigger_cosine(const MlpModel& model, const Tensor& batch, const Tensor& trigger,
                           bool clip_inputs);

// True iff |T_new - T_old|_2 >= eps_abs (the boundary counts as a change).
bool should_refresh(const Tensor& t_new, const Tensor& t_old, double eps_abs);
double refresh_threshold(const Tensor& t_new, double fraction);

enum class ScoreSpace { probabilities, logits };

struct PositionScore {
  std::size_t position = 0;
  double score = 0.0;
};

// S_i = 1 - cos(F(X), F(X with placeholder at i)) for the first `candidates`
// positions, F being softmax scores (or raw logits).
std::vector<PositionScore> position_scores(const SeqModel& model,
                                           std::span<const std::uint32_t> seq,
                                           std::uint32_t placeholder, std::size_t candidates,
                                           ScoreSpace space = ScoreSpace::probabilities);

// Per-position mean of `position_scores` over every sequence of `data`.
std::vector<PositionScore> mean_position_scores(const SeqModel& model, const TextDataset& data,
                                                std::size_t candidates,
                                                ScoreSpace space = ScoreSpace::probabilities);

// The `count` highest scores, ordered by score descending then position
// ascending.
std::vector<std::size_t> select_positions(std::span<const PositionScore> scores, std::size_t count);

}  // namespace edba
