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

#include "attacks/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "data/poison.hpp"
#include "nn/loss.hpp"

namespace edba {

Corner parse_corner(std::string_view s) {
  if (s == "top_left") return Corner::top_left;
  if (s == "top_right") return Corner::top_right;
  if (s == "bottom_left") return Corner::bottom_left;
  if (s == "bottom_right") return Corner::bottom_right;
  fail(ErrorCode::invalid_argument, "unknown patch corner: " + std::string(s));
}

std::string to_string(Corner c) {
  switch (c) {
    case Corner::top_left: return "top_left";
    case Corner::top_right: return "top_right";
    case Corner::bottom_left: return "bottom_left";
    case Corner::bottom_right: return "bottom_right";
  }
  return "bottom_right";
}

VisionTrigger baseline_fixed_patch(const PatchSpec& spec) {
  require(spec.size <= spec.height && spec.size <= spec.width, ErrorCode::invalid_argument,
          "patch larger than image");
  VisionTrigger t{Tensor({spec.height * spec.width}), 0};
  const bool bottom = spec.corner == Corner::bottom_left || spec.corner == Corner::bottom_right;
  const bool right = spec.corner == Corner::top_right || spec.corner == Corner::bottom_right;
  const std::size_t r0 = bottom ? spec.height - spec.size : 0;
  const std::size_t c0 = right ? spec.width - spec.size : 0;
  for (std::size_t r = r0; r < r0 + spec.size; ++r)
    for (std::size_t c = c0; c < c0 + spec.size; ++c) t.pattern.data[r * spec.width + c] = spec.value;
  return t;
}

FlatParams baseline_scale_update(const FlatParams& delta, double factor) {
  FlatParams out = delta;
  for (double& v : out.data()) v *= factor;
  return out;
}

FlatParams neurotoxin_mask(std::span<const double> benign_history, const FlatParams& delta,
                           double fraction) {
  require(benign_history.size() == delta.size(), ErrorCode::shape_mismatch,
          "benign history length differs from update length");
  require(fraction >= 0.0 && fraction <= 1.0, ErrorCode::invalid_argument,
          "mask fraction must lie in [0,1]");
  const std::size_t n = delta.size();
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(benign_history[a]) < std::abs(benign_history[b]);
  });
  FlatParams out = delta.zeros_like();
  for (std::size_t k = 0; k < std::min(keep, n); ++k) out.data()[order[k]] = delta.data()[order[k]];
  return out;
}

VisionTrigger baseline_pgd_trigger(const MlpModel& model, const Tensor& batch, int target_label,
                                   int steps, double step_size, double linf_bound,
                                   bool clip_inputs) {
  require(steps >= 0 && step_size >= 0.0 && linf_bound >= 0.0, ErrorCode::invalid_argument,
          "PGD parameters must be non-negative");
  VisionTrigger t{Tensor({model.input_dim()}), 0};
  const std::vector<int> targets(batch.rows(), target_label);
  for (int s = 0; s < steps; ++s) {
    Tensor z = batch;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      auto row = z.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] += t.pattern.data[j];
        if (clip_inputs) row[j] = std::clamp(row[j], 0.0, 1.0);
      }
    }
    const Tensor gz = grad_input(model, z, LossSpec::cross_entropy(targets));
    std::vector<double> g(t.pattern.size(), 0.0);
    for (std::size_t r = 0; r < gz.rows(); ++r) {
      auto x = batch.row(r);
      auto gr = gz.row(r);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double sum = x[j] + t.pattern.data[j];
        if (clip_inputs && (sum < 0.0 || sum > 1.0)) continue;
        g[j] += gr[j];
      }
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double sgn = g[j] > 0.0 ? 1.0 : (g[j] < 0.0 ? -1.0 : 0.0);
      t.pattern.data[j] = std::clamp(t.pattern.data[j] - step_size * sgn, -linf_bound, linf_bound);
    }
  }
  return t;
}

}  // namespace edba
