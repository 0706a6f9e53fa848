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
#include <memory>
#include <span>
#include <string>

#include "attacks/local_training.hpp"
#include "attacks/trigger_io.hpp"
#include "data/snapshot.hpp"
#include "engine/config.hpp"
#include "metrics/evaluation.hpp"
#include "nn/checkpoint.hpp"

namespace edba {

// Stream tags for derive_seed(master, {tag, ...}).
enum SeedTag : std::uint64_t {
  kSeedData = 1,
  kSeedPartition,
  kSeedInit,
  kSeedSelect,
  kSeedAttack,
  kSeedTrain,
  kSeedNoise,
  kSeedTrigger,
};

// Modality-specific half of an experiment: data, model, trigger state and
// the client trainers. Training calls are const and safe to run
// concurrently; prepare_attack mutates the shared trigger state and must be
// called serially.
class Workload {
 public:
  virtual ~Workload() = default;

  virtual const FlatParams& global() const = 0;
  virtual void set_global(FlatParams params) = 0;
  virtual std::size_t client_count() const = 0;
  virtual std::size_t client_size(int client) const = 0;

  virtual ClientUpdate train_honest(int client, std::uint64_t seed) const = 0;
  // Refreshes the attacker's trigger against the current global model using
  // the data of this round's malicious clients.
  virtual void prepare_attack(std::span<const int> malicious, std::uint64_t seed) = 0;
  virtual ClientUpdate train_malicious(int client, std::uint64_t seed) const = 0;

  // MA on the clean test set, BA with the attacker's current trigger.
  virtual EvalReport evaluate() const = 0;

  virtual std::uint64_t trigger_version() const = 0;
  virtual AnyTrigger trigger() const = 0;
  virtual Checkpoint checkpoint() const = 0;
};

std::unique_ptr<Workload> make_workload(const ExperimentConfig& cfg);

// The train and test splits an experiment with this config uses.
std::pair<AnyDataset, AnyDataset> build_datasets(const ExperimentConfig& cfg);

}  // namespace edba
