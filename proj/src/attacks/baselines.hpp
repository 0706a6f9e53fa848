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

#include "attacks/triggers.hpp"
#include "nn/models.hpp"
#include "nn/params.hpp"

namespace edba {

enum class Corner { top_left, top_right, bottom_left, bottom_right };

Corner parse_corner(std::string_view s);
std::string to_string(Corner c);

// Square patch of `value` in one corner of a height x width image, zero
// elsewhere, flattened row-major.
struct PatchSpec {
  std::size_t height = 6;
  std::size_t width = 6;
  std::size_t size = 2;
  Corner corner = Corner::bottom_right;
  double value = 1.0;
};

VisionTrigger baseline_fixed_patch(const PatchSpec& spec);

// Model-replacement style amplification of a submitted delta.
FlatParams baseline_scale_update(const FlatParams& delta, double factor);

// Keeps only the llround(fraction * n) coordinates whose historical benign
// update magnitude is smallest (ties: lower index first); zeroes the rest.
FlatParams neurotoxin_mask(std::span<const double> benign_history, const FlatParams& delta,
                           double fraction);

// Targeted signed-gradient descent on cross-entropy toward `target_label`,
// projected onto the L-inf ball of radius `linf_bound` after every step.
VisionTrigger baseline_pgd_trigger(const MlpModel& model, const Tensor& batch, int target_label,
                                   int steps, double step_size, double linf_bound,
                                   bool clip_inputs = true);

}  // namespace edba
