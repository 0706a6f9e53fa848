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
#include <vector>

namespace edba {

struct ClientPartition {
  int client_id = 0;
  std::vector<std::size_t> indices;
};

// Shuffled near-equal split (sizes differ by at most one).
std::vector<ClientPartition> iid_partition(std::size_t n, std::size_t n_clients,
                                           std::uint64_t seed);

// Per class k: shares p ~ Dir(alpha * 1) over clients; the shuffled class-k
// indices are split by largest-remainder rounding of p * n_k, so the result
// is always a disjoint cover. Clients may end up empty.
std::vector<ClientPartition> dirichlet_partition(std::span<const int> labels,
                                                 std::size_t n_clients, double alpha,
                                                 std::uint64_t seed);

// Largest-remainder apportionment of `total` items by `weights` (sum > 0).
// Ties in the remainder go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total);

// Entropy (nats) of a client's label histogram; 0 for an empty client.
double label_entropy(std::span<const int> labels, std::span<const std::size_t> indices,
                     std::size_t classes);

}  // namespace edba
