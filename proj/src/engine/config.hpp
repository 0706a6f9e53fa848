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
#include <string>
#include <vector>

#include "attacks/baselines.hpp"
#include "attacks/local_training.hpp"
#include "attacks/triggers.hpp"
#include "defenses/aggregators.hpp"

namespace edba {

enum class Modality { vision, text };
enum class ScenarioKind { fixed_frequency, fixed_pool };
enum class PartitionKind { iid, dirichlet };

// Attack method tags. Each one is a trigger source paired with an optional
// post-training transform of the malicious delta.
enum class AttackMethod { none, badnets, edba, scaling, neurotoxin, pgd, edba_neurotoxin };
enum class TriggerSource { none, patch, optimized, pgd };
enum class UpdateTransform { none, scale, neurotoxin };

std::string to_string(Modality m);
std::string to_string(ScenarioKind k);
std::string to_string(PartitionKind k);
std::string to_string(AttackMethod m);
AttackMethod parse_attack_method(std::string_view s);

TriggerSource trigger_source(AttackMethod m);
UpdateTransform update_transform(AttackMethod m);

struct DatasetConfig {
  Modality modality = Modality::vision;
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  std::size_t classes = 10;
  // vision
  std::size_t dim = 36;
  double cluster_spread = 0.1;
  // text
  std::size_t seq_len = 16;
  std::size_t vocab = 64;
};

struct ModelConfig {
  std::vector<std::size_t> hidden{64, 64};
  Activation activation = Activation::relu;
  std::size_t embed_dim = 32;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::fixed_pool;
  int frequency = 10;            // fixed-frequency: one attacker every f rounds
  bool substitute = true;        // fixed-frequency: replace an honest pick instead of adding
  double malicious_ratio = 0.25; // fixed-pool
};

struct PartitionConfig {
  PartitionKind kind = PartitionKind::iid;
  double alpha = 0.5;
};

struct TextAttackConfig {
  std::size_t candidates = 8;      // positions scored
  std::size_t trigger_length = 3;  // positions replaced
  ScoreSpace score_space = ScoreSpace::probabilities;
};

struct PgdConfig {
  int steps = 10;
  double step_size = 0.05;
  double linf_bound = 0.3;
};

struct AttackConfig {
  AttackMethod method = AttackMethod::edba;
  int window_start = 0;  // malicious clients take part in rounds [start, stop)
  int window_stop = 60;
  int target_label = 0;
  InjectionConfig injection;  // injection.poison.target_label mirrors target_label
  // Baselines train without the norm penalty unless this is set.
  bool penalize_baselines = false;
  TriggerOptConfig trigger;
  double trigger_init_scale = 1.0;  // optimised trigger starts at U[0, scale]^d
  std::size_t trigger_batches = 4;  // clean batches used per optimisation
  bool refresh_per_batch = false;
  TextAttackConfig text;
  PatchSpec patch;
  double scale_factor = 10.0;
  double neurotoxin_fraction = 0.05;
  double history_decay = 0.9;
  PgdConfig pgd;
};

struct MetricsConfig {
  double lifespan_threshold = 90.0;
  bool exclude_target = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int rounds = 60;
  int n_clients = 20;
  int clients_per_round = 10;
  DatasetConfig dataset;
  ModelConfig model;
  PartitionConfig partition;
  ScenarioConfig scenario;
  LocalTrainConfig training;
  AttackConfig attack;
  AggregatorConfig defense;
  MetricsConfig metrics;
};

// Every field, with defaults filled in. Object keys come out sorted, so the
// dump is canonical.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

// Missing fields keep their defaults; unknown keys and out-of-range values
// are rejected with the dotted path of the offending field.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// `path=value` on the canonical JSON; the value is parsed as JSON when it
// parses, otherwise taken as a string. The path must name an existing field.
ExperimentConfig apply_override(const ExperimentConfig& cfg, std::string_view assignment);
// Applies every assignment before validating, so their order does not matter.
ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 std::span<const std::string> assignments);

void validate(const ExperimentConfig& cfg);

// FNV-1a over the canonical compact dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace edba
