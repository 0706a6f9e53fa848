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

#include "engine/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <thread>

#include "attacks/baselines.hpp"
#include "common/error.hpp"
#include "defenses/aggregators.hpp"

namespace edba {

Experiment::Experiment(ExperimentConfig cfg, RunOptions opts)
    : cfg_(std::move(cfg)), opts_(std::move(opts)), work_(make_workload(cfg_)) {
  history_.assign(work_->global().size(), 0.0);
}

std::vector<ClientUpdate> Experiment::train_clients(const Selection& sel) {
  const std::size_t n = sel.selected.size();
  std::vector<ClientUpdate> out(n);
  std::vector<std::exception_ptr> errors(n);
  auto job = [&](std::size_t i) {
    const int id = sel.selected[i];
    const auto seed = derive_seed(cfg_.seed, {kSeedTrain, static_cast<std::uint64_t>(round_),
                                              static_cast<std::uint64_t>(id)});
    const bool bad = std::binary_search(sel.malicious.begin(), sel.malicious.end(), id);
    try {
      out[i] = bad ? work_->train_malicious(id, seed) : work_->train_honest(id, seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, opts_.threads));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) job(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

RoundRecord Experiment::run_round() {
  require(!finished(), ErrorCode::invalid_argument, "experiment already finished");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = static_cast<std::uint64_t>(round_);
  Rng sel_rng(derive_seed(cfg_.seed, {kSeedSelect, r}));
  const Selection sel = select_clients(cfg_, round_, sel_rng);
  require(sel.malicious.empty() || in_attack_window(cfg_, round_), ErrorCode::internal,
          "malicious client selected outside the attack window");

  if (!sel.malicious.empty()) work_->prepare_attack(sel.malicious, derive_seed(cfg_.seed, {kSeedAttack, r}));
  auto updates = train_clients(sel);

  const auto transform = update_transform(cfg_.attack.method);
  for (auto& u : updates) {
    if (!std::binary_search(sel.malicious.begin(), sel.malicious.end(), u.client_id)) continue;
    if (transform == UpdateTransform::scale)
      u.delta = baseline_scale_update(u.delta, cfg_.attack.scale_factor);
    else if (transform == UpdateTransform::neurotoxin)
      u.delta = neurotoxin_mask(history_, u.delta, cfg_.attack.neurotoxin_fraction);
  }

  RoundRecord rec;
  rec.round = round_;
  rec.selected = sel.selected;
  rec.malicious = sel.malicious;
  if (updates.empty()) {
    rec.fallback_noop = true;
  } else {
    auto agg = aggregate(cfg_.defense, updates, derive_seed(cfg_.seed, {kSeedNoise, r}));
    FlatParams next = work_->global();
    axpy(1.0, agg.delta, next.data());
    if (!next.all_finite()) {
      std::string where = "non-finite global model after aggregation in round " +
                          std::to_string(round_);
      if (!opts_.dump_dir.empty()) {
        std::filesystem::create_directories(opts_.dump_dir);
        const auto path = opts_.dump_dir + "/abort_round" + std::to_string(round_) + ".ckpt";
        auto ck = work_->checkpoint();
        ck.params = next;
        save_checkpoint(path, ck);
        where += " (state written to " + path + ")";
      }
      fail(ErrorCode::numeric, where);
    }
    const double decay = cfg_.attack.history_decay;
    for (std::size_t i = 0; i < history_.size(); ++i)
      history_[i] = decay * history_[i] + (1.0 - decay) * std::abs(agg.delta[i]);
    work_->set_global(std::move(next));
    rec.accepted = std::move(agg.diagnostics.accepted);
    rec.scores = std::move(agg.diagnostics.scores);
    rec.fallback_noop = agg.diagnostics.fallback_noop;
  }
  const auto ev = work_->evaluate();
  rec.ma = ev.ma;
  rec.ba = ev.ba;
  rec.trigger_version = work_->trigger_version();
  records_.push_back(rec);
  wall_.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  ++round_;
  if (opts_.on_round) opts_.on_round(rec);
  return rec;
}

void Experiment::run_all() {
  while (!finished()) run_round();
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  Experiment exp(cfg, opts);
  exp.run_all();
  return {exp.records(), exp.wall_seconds(), exp.workload().checkpoint(), exp.workload().trigger()};
}

}  // namespace edba
