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

#include "attacks/local_training.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/sgd.hpp"

namespace edba {

void proximal_norm_shrink(FlatParams& params, const FlatParams& anchor, double tau) {
  auto& p = params.data();
  const auto& a = anchor.data();
  const double dist = l2_distance(p, a);
  if (dist == 0.0) return;
  const double keep = std::max(0.0, 1.0 - tau / dist);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] + (p[i] - a[i]) * keep;
}

namespace {

// Shared minibatch loop. `poison(x, y, rng)` may rewrite a batch and returns
// how many rows it poisoned; it is only called in poison epochs.
template <class Model, class Data, class Poison>
ClientUpdate run_local_sgd(const Model& global, const Data& data,
                           std::span<const std::size_t> indices, const LocalTrainConfig& cfg,
                           const InjectionConfig* inj, std::uint64_t seed, int client_id,
                           Poison&& poison) {
  require(cfg.batch_size > 0, ErrorCode::invalid_argument, "batch size must be positive");
  require(cfg.epochs >= 0, ErrorCode::invalid_argument, "local epochs must be >= 0");
  Model model = global;
  SgdState opt = SgdState::for_params(model.params(), cfg.lr, cfg.momentum, cfg.weight_decay);
  Rng shuffle_rng(derive_seed(seed, {1}));
  Rng poison_rng(derive_seed(seed, {2}));
  std::vector<std::size_t> order(indices.begin(), indices.end());
  const int poison_from = inj ? (inj->interleave ? 0 : std::max(0, cfg.epochs - inj->poison_epochs))
                              : cfg.epochs;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_range(order.begin(), order.end(), shuffle_rng);
    const bool poison_epoch = epoch >= poison_from;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      std::span<const std::size_t> rows(order.data() + start, len);
      auto x = data.gather(rows);
      auto y = data.gather_labels(rows);
      std::size_t poisoned = poison_epoch ? poison(x, y, poison_rng) : 0;
      opt.lr = poisoned > 0 ? inj->poison_lr : cfg.lr;
      ParamGrad pg;
      try {
        pg = loss_and_grad(model, x, LossSpec::cross_entropy(y));
      } catch (const Error& e) {
        fail(e.code(), std::string(e.what()) + " (client " + std::to_string(client_id) +
                           ", epoch " + std::to_string(epoch) + ", batch starting at " +
                           std::to_string(start) + ")");
      }
      require(std::isfinite(pg.loss), ErrorCode::numeric,
              "non-finite local loss (client " + std::to_string(client_id) + ", epoch " +
                  std::to_string(epoch) + ")");
      sgd_step(opt, model.params(), pg.grad);
      if (inj && inj->gamma > 0.0)
        proximal_norm_shrink(model.params(), global.params(), opt.lr * inj->gamma);
    }
  }
  ClientUpdate up;
  up.client_id = client_id;
  up.delta = model.params();
  auto& d = up.delta.data();
  const auto& g = global.params().data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g[i];
  require(up.delta.all_finite(), ErrorCode::numeric,
          "non-finite local update from client " + std::to_string(client_id));
  return up;
}

constexpr auto no_poison = [](auto&, auto&, Rng&) -> std::size_t { return 0; };

}  // namespace

ClientUpdate train_honest_local(const MlpModel& global, const VisionDataset& data,
                                std::span<const std::size_t> indices,
                                const LocalTrainConfig& cfg, std::uint64_t seed, int client_id) {
  return run_local_sgd(global, data, indices, cfg, nullptr, seed, client_id, no_poison);
}

ClientUpdate train_honest_local(const SeqModel& global, const TextDataset& data,
                                std::span<const std::size_t> indices,
                                const LocalTrainConfig& cfg, std::uint64_t seed, int client_id) {
  return run_local_sgd(global, data, indices, cfg, nullptr, seed, client_id, no_poison);
}

ClientUpdate train_backdoored_local(const MlpModel& global, const VisionDataset& data,
                                    std::span<const std::size_t> indices,
                                    const VisionTrigger& trigger, const LocalTrainConfig& cfg,
                                    const InjectionConfig& inj, std::uint64_t seed, int client_id) {
  auto poison = [&](Tensor& x, std::vector<int>& y, Rng& rng) -> std::size_t {
    auto pb = poison_vision_batch(x, y, inj.poison, trigger.pattern, rng);
    if (pb.nothing_poisoned) return 0;
    x = std::move(pb.inputs);
    y = std::move(pb.labels);
    return pb.poisoned_rows.size();
  };
  return run_local_sgd(global, data, indices, cfg, &inj, seed, client_id, poison);
}

ClientUpdate train_backdoored_local(const SeqModel& global, const TextDataset& data,
                                    std::span<const std::size_t> indices,
                                    const TextTrigger& trigger, const LocalTrainConfig& cfg,
                                    const InjectionConfig& inj, std::uint64_t seed, int client_id) {
  auto poison = [&](TokenBatch& x, std::vector<int>& y, Rng& rng) -> std::size_t {
    auto pb = poison_text_batch(x, y, inj.poison, trigger.tokens, trigger.positions, rng);
    if (pb.nothing_poisoned) return 0;
    x = std::move(pb.inputs);
    y = std::move(pb.labels);
    return pb.poisoned_rows.size();
  };
  return run_local_sgd(global, data, indices, cfg, &inj, seed, client_id, poison);
}

}  // namespace edba
