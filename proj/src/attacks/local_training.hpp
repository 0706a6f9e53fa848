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
#include <span>

#include "attacks/triggers.hpp"
#include "data/datasets.hpp"
#include "data/poison.hpp"
#include "nn/models.hpp"

namespace edba {

struct LocalTrainConfig {
  double lr = 0.05;
  int epochs = 2;
  std::size_t batch_size = 32;
  double momentum = 0.9;
  double weight_decay = 5e-4;
};

// Malicious local objective: mean cross-entropy over clean and poisoned rows
// plus gamma * |theta - theta_global|_2.
struct InjectionConfig {
  double poison_lr = 0.05;
  int poison_epochs = 2;
  double gamma = 0.1;
  PoisonSpec poison;
  // false: only the last `poison_epochs` of the local epochs carry poisoned
  // rows. true: every epoch does.
  bool interleave = false;
};

struct ClientUpdate {
  int client_id = 0;
  FlatParams delta;  // local params minus global params
};

// Plain minibatch momentum SGD from the global snapshot.
ClientUpdate train_honest_local(const MlpModel& global, const VisionDataset& data,
                                std::span<const std::size_t> indices,
                                const LocalTrainConfig& cfg, std::uint64_t seed, int client_id);
ClientUpdate train_honest_local(const SeqModel& global, const TextDataset& data,
                                std::span<const std::size_t> indices,
                                const LocalTrainConfig& cfg, std::uint64_t seed, int client_id);

// Backdoor injection. Batches holding poisoned rows step with poison_lr; the
// norm penalty is applied as its proximal map after every step, which
// shrinks theta - theta_global by lr * gamma in norm (to zero if shorter).
// With gamma = 0 and nothing poisoned this is bit-identical to the honest
// trainer under the same seed.
ClientUpdate train_backdoored_local(const MlpModel& global, const VisionDataset& data,
                                    std::span<const std::size_t> indices,
                                    const VisionTrigger& trigger, const LocalTrainConfig& cfg,
                                    const InjectionConfig& inj, std::uint64_t seed, int client_id);
ClientUpdate train_backdoored_local(const SeqModel& global, const TextDataset& data,
                                    std::span<const std::size_t> indices,
                                    const TextTrigger& trigger, const LocalTrainConfig& cfg,
                                    const InjectionConfig& inj, std::uint64_t seed, int client_id);

// theta <- anchor + (theta - anchor) * max(0, 1 - tau / |theta - anchor|).
void proximal_norm_shrink(FlatParams& params, const FlatParams& anchor, double tau);

}  // namespace edba
