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
#include <vector>

#include "attacks/triggers.hpp"
#include "data/datasets.hpp"
#include "nn/models.hpp"

namespace edba {

struct EvalReport {
  double ma = 0.0;  // percent
  double ba = 0.0;  // percent
  std::vector<double> per_class;  // clean accuracy per class, percent (0 for empty classes)
  std::size_t clean_total = 0;
  std::size_t clean_correct = 0;
  std::size_t backdoor_total = 0;  // triggered samples counted for BA
  std::size_t backdoor_hits = 0;   // of those, predicted as the target
};

// Percent of samples whose argmax logit equals the label (ties to the lowest
// class). Empty sets score 0.
double main_accuracy(const MlpModel& model, const VisionDataset& test);
double main_accuracy(const SeqModel& model, const TextDataset& test);

// Percent of triggered samples predicted as `target`. With `exclude_target`
// samples whose true label is the target are left out.
double backdoor_accuracy(const MlpModel& model, const VisionDataset& test, const Tensor& trigger,
                         int target, bool exclude_target = true);
double backdoor_accuracy(const SeqModel& model, const TextDataset& test,
                         const TextTrigger& trigger, int target, bool exclude_target = true);

EvalReport evaluate(const MlpModel& model, const VisionDataset& test, const Tensor& trigger,
                    int target, bool exclude_target = true);
EvalReport evaluate(const SeqModel& model, const TextDataset& test, const TextTrigger& trigger,
                    int target, bool exclude_target = true);

// Tallies for a prediction vector; shared by both modalities.
EvalReport tally(std::span<const int> clean_pred, std::span<const int> labels,
                 std::span<const int> triggered_pred, std::size_t classes, int target,
                 bool exclude_target);

}  // namespace edba
