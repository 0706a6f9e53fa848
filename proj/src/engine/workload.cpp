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

#include "engine/workload.hpp"

#include <algorithm>
#include <cmath>

#include "attacks/baselines.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "data/partition.hpp"

namespace edba {

namespace {

std::vector<std::vector<std::size_t>> make_partitions(const ExperimentConfig& cfg,
                                                      std::span<const int> labels) {
  const auto seed = derive_seed(cfg.seed, {kSeedPartition});
  const auto n = static_cast<std::size_t>(cfg.n_clients);
  auto parts = cfg.partition.kind == PartitionKind::iid
                   ? iid_partition(labels.size(), n, seed)
                   : dirichlet_partition(labels, n, cfg.partition.alpha, seed);
  std::vector<std::vector<std::size_t>> out(n);
  for (auto& p : parts) out[static_cast<std::size_t>(p.client_id)] = std::move(p.indices);
  return out;
}

std::pair<VisionDataset, VisionDataset> vision_splits(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  auto all = make_vision_dataset(derive_seed(cfg.seed, {kSeedData}), d.train_size + d.test_size,
                                 d.dim, d.classes, d.cluster_spread);
  return split_tail(all, d.test_size);
}

std::pair<TextDataset, TextDataset> text_splits(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  auto all = make_text_dataset(derive_seed(cfg.seed, {kSeedData}), d.train_size + d.test_size,
                               d.seq_len, d.vocab, d.classes);
  return split_tail(all, d.test_size);
}

InjectionConfig injection_for(const AttackConfig& a) {
  InjectionConfig inj = a.injection;
  inj.poison.target_label = a.target_label;
  if (trigger_source(a.method) != TriggerSource::optimized && !a.penalize_baselines)
    inj.gamma = 0.0;
  return inj;
}

// Rows of the malicious clients' data used for trigger work, in a seeded
// order, capped at `limit`.
std::vector<std::size_t> attack_rows(const std::vector<std::vector<std::size_t>>& parts,
                                     std::span<const int> malicious, std::size_t limit,
                                     std::uint64_t seed) {
  std::vector<std::size_t> rows;
  for (int id : malicious) {
    const auto& p = parts[static_cast<std::size_t>(id)];
    rows.insert(rows.end(), p.begin(), p.end());
  }
  Rng rng(seed);
  shuffle_range(rows.begin(), rows.end(), rng);
  if (rows.size() > limit) rows.resize(limit);
  return rows;
}

class VisionWorkload final : public Workload {
 public:
  explicit VisionWorkload(const ExperimentConfig& cfg) : cfg_(cfg), inj_(injection_for(cfg.attack)) {
    const auto& d = cfg.dataset;
    std::tie(train_, test_) = vision_splits(cfg);
    parts_ = make_partitions(cfg, train_.labels);
    std::vector<std::size_t> widths{d.dim};
    widths.insert(widths.end(), cfg.model.hidden.begin(), cfg.model.hidden.end());
    widths.push_back(d.classes);
    model_ = MlpModel::create(widths, cfg.model.activation, derive_seed(cfg.seed, {kSeedInit}));
    init_trigger();
  }

  const FlatParams& global() const override { return model_.params(); }
  void set_global(FlatParams p) override { model_.set_params(std::move(p)); }
  std::size_t client_count() const override { return parts_.size(); }
  std::size_t client_size(int c) const override { return parts_.at(static_cast<std::size_t>(c)).size(); }

  ClientUpdate train_honest(int client, std::uint64_t seed) const override {
    return train_honest_local(model_, train_, parts_.at(static_cast<std::size_t>(client)),
                              cfg_.training, seed, client);
  }

  ClientUpdate train_malicious(int client, std::uint64_t seed) const override {
    return train_backdoored_local(model_, train_, parts_.at(static_cast<std::size_t>(client)),
                                  trigger_, cfg_.training, inj_, seed, client);
  }

  void prepare_attack(std::span<const int> malicious, std::uint64_t seed) override {
    const auto& a = cfg_.attack;
    const auto source = trigger_source(a.method);
    if (source != TriggerSource::optimized && source != TriggerSource::pgd) return;
    const auto bs = cfg_.training.batch_size;
    const auto rows = attack_rows(parts_, malicious, a.trigger_batches * bs, seed);
    if (rows.empty()) return;
    std::vector<Tensor> batches;
    for (std::size_t s = 0; s < rows.size(); s += bs) {
      const auto len = std::min(bs, rows.size() - s);
      batches.push_back(train_.gather(std::span<const std::size_t>(rows.data() + s, len)));
    }
    if (source == TriggerSource::pgd) {
      auto t = baseline_pgd_trigger(model_, train_.gather(rows), a.target_label, a.pgd.steps,
                                    a.pgd.step_size, a.pgd.linf_bound);
      trigger_.pattern = std::move(t.pattern);
      ++trigger_.version;
      return;
    }
    if (a.refresh_per_batch) {
      for (const auto& b : batches) consider(optimize_vision_trigger(model_, std::span(&b, 1),
                                                                    trigger_.pattern, a.trigger)
                                                 .trigger);
    } else {
      consider(optimize_vision_trigger(model_, batches, trigger_.pattern, a.trigger).trigger);
    }
  }

  EvalReport evaluate() const override {
    return edba::evaluate(model_, test_, trigger_.pattern, cfg_.attack.target_label,
                          cfg_.metrics.exclude_target);
  }

  std::uint64_t trigger_version() const override { return trigger_.version; }
  AnyTrigger trigger() const override { return trigger_; }
  Checkpoint checkpoint() const override { return {model_.architecture(), model_.params()}; }

 private:
  void init_trigger() {
    const auto& a = cfg_.attack;
    const auto dim = cfg_.dataset.dim;
    switch (trigger_source(a.method)) {
      case TriggerSource::patch: {
        PatchSpec p = a.patch;
        p.height = p.width = static_cast<std::size_t>(std::llround(std::sqrt(double(dim))));
        trigger_ = baseline_fixed_patch(p);
        break;
      }
      case TriggerSource::optimized: {
        Rng rng(derive_seed(cfg_.seed, {kSeedTrigger}));
        trigger_.pattern = Tensor({dim}, 0.0);
        for (double& v : trigger_.pattern.data) v = a.trigger_init_scale * uniform01(rng);
        break;
      }
      default:
        trigger_.pattern = Tensor({dim}, 0.0);
    }
  }

  // Adopts a candidate when it moved far enough from the active trigger;
  // the first candidate is always adopted.
  void consider(Tensor candidate) {
    const double eps = refresh_threshold(candidate, cfg_.attack.trigger.refresh_fraction);
    if (!adopted_ || should_refresh(candidate, trigger_.pattern, eps)) {
      trigger_.pattern = std::move(candidate);
      ++trigger_.version;
      adopted_ = true;
    }
  }

  ExperimentConfig cfg_;
  InjectionConfig inj_;
  VisionDataset train_, test_;
  std::vector<std::vector<std::size_t>> parts_;
  MlpModel model_;
  VisionTrigger trigger_;
  bool adopted_ = false;
};

class TextWorkload final : public Workload {
 public:
  explicit TextWorkload(const ExperimentConfig& cfg) : cfg_(cfg), inj_(injection_for(cfg.attack)) {
    const auto& d = cfg.dataset;
    std::tie(train_, test_) = text_splits(cfg);
    parts_ = make_partitions(cfg, train_.labels);
    model_ = SeqModel::create(d.vocab, cfg.model.embed_dim, cfg.model.hidden, d.classes,
                              cfg.model.activation, derive_seed(cfg.seed, {kSeedInit}));
    const auto m = cfg.attack.text.trigger_length;
    const auto rare = train_.vocab.rare_tokens();
    if (cfg.attack.method != AttackMethod::none) {
      for (std::size_t i = 0; i < m; ++i) {
        trigger_.tokens.push_back(rare[i % rare.size()]);
        trigger_.positions.push_back(i);
      }
    }
  }

  const FlatParams& global() const override { return model_.params(); }
  void set_global(FlatParams p) override { model_.set_params(std::move(p)); }
  std::size_t client_count() const override { return parts_.size(); }
  std::size_t client_size(int c) const override { return parts_.at(static_cast<std::size_t>(c)).size(); }

  ClientUpdate train_honest(int client, std::uint64_t seed) const override {
    return train_honest_local(model_, train_, parts_.at(static_cast<std::size_t>(client)),
                              cfg_.training, seed, client);
  }

  ClientUpdate train_malicious(int client, std::uint64_t seed) const override {
    return train_backdoored_local(model_, train_, parts_.at(static_cast<std::size_t>(client)),
                                  trigger_, cfg_.training, inj_, seed, client);
  }

  void prepare_attack(std::span<const int> malicious, std::uint64_t seed) override {
    const auto& a = cfg_.attack;
    if (trigger_source(a.method) != TriggerSource::optimized) return;
    const auto rows = attack_rows(parts_, malicious, a.trigger_batches * cfg_.training.batch_size,
                                  seed);
    if (rows.empty()) return;
    const auto scores =
        mean_position_scores(model_, train_.subset(rows), a.text.candidates, a.text.score_space);
    auto positions = select_positions(scores, a.text.trigger_length);
    if (!adopted_ || positions != trigger_.positions) {
      trigger_.positions = std::move(positions);
      ++trigger_.version;
      adopted_ = true;
    }
  }

  EvalReport evaluate() const override {
    return edba::evaluate(model_, test_, trigger_, cfg_.attack.target_label,
                          cfg_.metrics.exclude_target);
  }

  std::uint64_t trigger_version() const override { return trigger_.version; }
  AnyTrigger trigger() const override { return trigger_; }
  Checkpoint checkpoint() const override { return {model_.architecture(), model_.params()}; }

 private:
  ExperimentConfig cfg_;
  InjectionConfig inj_;
  TextDataset train_, test_;
  std::vector<std::vector<std::size_t>> parts_;
  SeqModel model_;
  TextTrigger trigger_;
  bool adopted_ = false;
};

}  // namespace

std::pair<AnyDataset, AnyDataset> build_datasets(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.dataset.modality == Modality::vision) {
    auto [train, test] = vision_splits(cfg);
    return {std::move(train), std::move(test)};
  }
  auto [train, test] = text_splits(cfg);
  return {std::move(train), std::move(test)};
}

std::unique_ptr<Workload> make_workload(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.dataset.modality == Modality::vision) return std::make_unique<VisionWorkload>(cfg);
  return std::make_unique<TextWorkload>(cfg);
}

}  // namespace edba
