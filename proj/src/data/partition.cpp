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

#include "data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace edba {

std::vector<ClientPartition> iid_partition(std::size_t n, std::size_t n_clients,
                                           std::uint64_t seed) {
  require(n_clients >= 1, ErrorCode::invalid_argument, "need at least one client");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  shuffle_range(idx.begin(), idx.end(), rng);
  std::vector<ClientPartition> parts(n_clients);
  for (std::size_t c = 0; c < n_clients; ++c) parts[c].client_id = static_cast<int>(c);
  for (std::size_t i = 0; i < n; ++i) parts[i % n_clients].indices.push_back(idx[i]);
  for (auto& p : parts) std::sort(p.indices.begin(), p.indices.end());
  return parts;
}

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(sum > 0.0, ErrorCode::invalid_argument, "largest_remainder needs positive weights");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double exact = weights[j] / sum * static_cast<double>(total);
    counts[j] = static_cast<std::size_t>(std::floor(exact));
    frac[j] = exact - std::floor(exact);
    assigned += counts[j];
  }
  // Floating error can overshoot by a unit on degenerate inputs.
  while (assigned > total) {
    auto j = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    --counts[j];
    --assigned;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

std::vector<ClientPartition> dirichlet_partition(std::span<const int> labels,
                                                 std::size_t n_clients, double alpha,
                                                 std::uint64_t seed) {
  require(n_clients >= 1, ErrorCode::invalid_argument, "need at least one client");
  require(alpha > 0.0, ErrorCode::invalid_argument, "Dirichlet alpha must be positive");
  int max_label = -1;
  for (int y : labels) {
    require(y >= 0, ErrorCode::invalid_argument, "negative label");
    max_label = std::max(max_label, y);
  }
  const std::size_t classes = static_cast<std::size_t>(max_label + 1);
  std::vector<ClientPartition> parts(n_clients);
  for (std::size_t c = 0; c < n_clients; ++c) parts[c].client_id = static_cast<int>(c);
  Rng rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  for (std::size_t k = 0; k < classes; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (static_cast<std::size_t>(labels[i]) == k) members.push_back(i);
    shuffle_range(members.begin(), members.end(), rng);
    std::vector<double> share(n_clients);
    double sum = 0.0;
    for (auto& s : share) {
      s = gamma(rng);
      sum += s;
    }
    // Tiny alpha can underflow every draw; the limit puts the class on one client.
    if (!(sum > 0.0)) share[uniform_index(rng, n_clients)] = 1.0;
    const auto counts = largest_remainder(share, members.size());
    std::size_t pos = 0;
    for (std::size_t c = 0; c < n_clients; ++c)
      for (std::size_t m = 0; m < counts[c]; ++m) parts[c].indices.push_back(members[pos++]);
  }
  for (auto& p : parts) std::sort(p.indices.begin(), p.indices.end());
  return parts;
}

double label_entropy(std::span<const int> labels, std::span<const std::size_t> indices,
                     std::size_t classes) {
  if (indices.empty()) return 0.0;
  std::vector<double> hist(classes, 0.0);
  for (auto i : indices) hist[static_cast<std::size_t>(labels[i])] += 1.0;
  double h = 0.0;
  for (double c : hist) {
    if (c <= 0.0) continue;
    const double p = c / static_cast<double>(indices.size());
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace edba
