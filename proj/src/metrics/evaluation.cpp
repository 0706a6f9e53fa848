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

#include "metrics/evaluation.hpp"

#include "common/error.hpp"
#include "data/poison.hpp"

namespace edba {

namespace {

double percent(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<int> predict(const MlpModel& m, const Tensor& x) {
  if (x.size() == 0) return {};
  return argmax_rows(forward(m, x));
}

std::vector<int> predict(const SeqModel& m, const TokenBatch& x) {
  if (x.rows() == 0) return {};
  return argmax_rows(forward(m, x));
}

TokenBatch triggered(const TextDataset& test, const TextTrigger& t) {
  if (test.size() == 0) return test.sequences;
  return apply_text_trigger(test.sequences, t.tokens, t.positions);
}

Tensor triggered(const VisionDataset& test, const Tensor& t) {
  if (test.size() == 0) return test.inputs;
  return apply_vision_trigger(test.inputs, t);
}

}  // namespace

EvalReport tally(std::span<const int> clean_pred, std::span<const int> labels,
                 std::span<const int> triggered_pred, std::size_t classes, int target,
                 bool exclude_target) {
  require(clean_pred.size() == labels.size() && triggered_pred.size() == labels.size(),
          ErrorCode::shape_mismatch, "prediction and label counts differ");
  EvalReport r;
  std::vector<std::size_t> class_total(classes, 0), class_correct(classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    require(y < classes, ErrorCode::invalid_argument, "label out of range");
    ++class_total[y];
    if (clean_pred[i] == labels[i]) {
      ++class_correct[y];
      ++r.clean_correct;
    }
    if (exclude_target && labels[i] == target) continue;
    ++r.backdoor_total;
    if (triggered_pred[i] == target) ++r.backdoor_hits;
  }
  r.clean_total = labels.size();
  r.ma = percent(r.clean_correct, r.clean_total);
  r.ba = percent(r.backdoor_hits, r.backdoor_total);
  r.per_class.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) r.per_class[k] = percent(class_correct[k], class_total[k]);
  return r;
}

double main_accuracy(const MlpModel& model, const VisionDataset& test) {
  const auto pred = predict(model, test.inputs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == test.labels[i];
  return percent(hits, test.size());
}

double main_accuracy(const SeqModel& model, const TextDataset& test) {
  const auto pred = predict(model, test.sequences);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == test.labels[i];
  return percent(hits, test.size());
}

EvalReport evaluate(const MlpModel& model, const VisionDataset& test, const Tensor& trigger,
                    int target, bool exclude_target) {
  return tally(predict(model, test.inputs), test.labels, predict(model, triggered(test, trigger)),
               model.classes(), target, exclude_target);
}

EvalReport evaluate(const SeqModel& model, const TextDataset& test, const TextTrigger& trigger,
                    int target, bool exclude_target) {
  return tally(predict(model, test.sequences), test.labels,
               predict(model, triggered(test, trigger)), model.classes(), target, exclude_target);
}

double backdoor_accuracy(const MlpModel& model, const VisionDataset& test, const Tensor& trigger,
                         int target, bool exclude_target) {
  return evaluate(model, test, trigger, target, exclude_target).ba;
}

double backdoor_accuracy(const SeqModel& model, const TextDataset& test,
                         const TextTrigger& trigger, int target, bool exclude_target) {
  return evaluate(model, test, trigger, target, exclude_target).ba;
}

}  // namespace edba
