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

#include "engine/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edba {

bool in_attack_window(const ExperimentConfig& cfg, int round) {
  return round >= cfg.attack.window_start && round < cfg.attack.window_stop;
}

int malicious_pool_size(const ExperimentConfig& cfg) {
  if (cfg.attack.method == AttackMethod::none) return 0;
  if (cfg.scenario.kind == ScenarioKind::fixed_frequency) return 1;
  // The epsilon keeps ratios such as 0.15 * 20 from rounding up past 3.
  const double raw = cfg.scenario.malicious_ratio * cfg.n_clients;
  return std::min(cfg.n_clients, static_cast<int>(std::ceil(raw - 1e-9)));
}

namespace {

std::vector<int> sample(std::vector<int> pool, std::size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<int> id_range(int begin, int end) {
  std::vector<int> v(static_cast<std::size_t>(std::max(0, end - begin)));
  std::iota(v.begin(), v.end(), begin);
  return v;
}

}  // namespace

Selection select_clients(const ExperimentConfig& cfg, int round, Rng& rng) {
  const int pool = malicious_pool_size(cfg);
  const auto k = static_cast<std::size_t>(cfg.clients_per_round);
  Selection s;
  if (cfg.scenario.kind == ScenarioKind::fixed_frequency) {
    const bool attack = pool > 0 && in_attack_window(cfg, round) &&
                        round % cfg.scenario.frequency == 0;
    s.selected = sample(id_range(pool, cfg.n_clients), k, rng);
    if (attack) {
      if (cfg.scenario.substitute && s.selected.size() == k) s.selected.back() = 0;
      else s.selected.push_back(0);
      s.malicious = {0};
    }
  } else {
    if (in_attack_window(cfg, round)) {
      s.selected = sample(id_range(0, cfg.n_clients), k, rng);
      for (int id : s.selected)
        if (id < pool) s.malicious.push_back(id);
    } else {
      s.selected = sample(id_range(pool, cfg.n_clients), k, rng);
    }
  }
  std::sort(s.selected.begin(), s.selected.end());
  std::sort(s.malicious.begin(), s.malicious.end());
  return s;
}

}  // namespace edba
