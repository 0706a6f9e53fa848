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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "engine/config.hpp"
#include "engine/selection.hpp"
#include "engine/workload.hpp"
#include "metrics/records.hpp"

namespace edba {

struct RunOptions {
  int threads = 1;
  // When set, a non-finite global model is written here before aborting.
  std::string dump_dir;
  std::function<void(const RoundRecord&)> on_round;
};

// One federated training run: selection, local training, aggregation and
// evaluation per round. Results do not depend on the thread count.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg, RunOptions opts = {});

  int next_round() const { return round_; }
  bool finished() const { return round_ >= cfg_.rounds; }

  RoundRecord run_round();
  void run_all();

  const ExperimentConfig& config() const { return cfg_; }
  const Workload& workload() const { return *work_; }
  const std::vector<RoundRecord>& records() const { return records_; }
  const std::vector<double>& wall_seconds() const { return wall_; }
  // EMA of |aggregated delta|, read by the masked-update attack.
  const std::vector<double>& update_history() const { return history_; }

 private:
  std::vector<ClientUpdate> train_clients(const Selection& sel);

  ExperimentConfig cfg_;
  RunOptions opts_;
  std::unique_ptr<Workload> work_;
  int round_ = 0;
  std::vector<RoundRecord> records_;
  std::vector<double> wall_;
  std::vector<double> history_;
};

struct RunResult {
  std::vector<RoundRecord> records;
  std::vector<double> wall_seconds;
  Checkpoint final_model;
  AnyTrigger trigger;
};

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace edba
