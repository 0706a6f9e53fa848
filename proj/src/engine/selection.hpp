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

#include <vector>

#include "common/rng.hpp"
#include "engine/config.hpp"

namespace edba {

struct Selection {
  std::vector<int> selected;   // ascending client ids
  std::vector<int> malicious;  // ascending, subset of selected
};

bool in_attack_window(const ExperimentConfig& cfg, int round);

// Ids [0, count) are the compromised clients: client 0 under fixed frequency,
// the first ceil(ratio * n) under fixed pool. Zero when the attack is "none".
int malicious_pool_size(const ExperimentConfig& cfg);

// Fixed frequency: honest clients are sampled uniformly; on rounds with
// round % f == 0 inside the window client 0 replaces one of them (or joins
// as an extra participant when `substitute` is off).
// Fixed pool: inside the window the whole pool is sampled uniformly; outside
// it only honest clients are.
Selection select_clients(const ExperimentConfig& cfg, int round, Rng& rng);

}  // namespace edba
