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
#include <string>
#include <vector>

#include "attacks/local_training.hpp"
#include "nn/params.hpp"

namespace edba {

enum class AggregationRule { fedavg, ndc, krum, multikrum, median, flame, freqfed };

AggregationRule parse_rule(std::string_view s);
std::string to_string(AggregationRule r);

struct AggregatorConfig {
  AggregationRule rule = AggregationRule::fedavg;
  double clip_norm = 3.0;
  int krum_f = 1;
  int multikrum_m = 6;
  double flame_lambda = 0.001;
  double freqfed_cutoff = 0.1;
};

// One entry per submitted update, in submission order.
struct DefenseDiagnostics {
  std::vector<char> accepted;
  std::vector<double> scores;   // Krum scores, clipped norms or fingerprint norms
  std::vector<int> clusters;    // density-clustering labels, -1 = noise
  bool fallback_noop = false;
  std::vector<std::string> warnings;
};

struct AggregationResult {
  std::vector<double> delta;  // to be added to the global params
  DefenseDiagnostics diagnostics;
};

// G + mean(deltas).
FlatParams fedavg(const FlatParams& global, std::span<const ClientUpdate> updates);
std::vector<double> mean_delta(std::span<const ClientUpdate> updates);

// Rescales every delta with norm above `threshold` onto the threshold sphere.
std::vector<ClientUpdate> norm_clip(std::span<const ClientUpdate> updates, double threshold);

// Sum of squared distances to the n - f - 2 nearest other updates (at least
// one neighbour).
std::vector<double> krum_scores(std::span<const ClientUpdate> updates, int f);
// Position of the Krum choice; ties go to the lowest client id.
std::size_t krum(std::span<const ClientUpdate> updates, int f);
// Positions chosen by repeated Krum with rescoring after each removal, in
// selection order.
std::vector<std::size_t> multi_krum_select(std::span<const ClientUpdate> updates, int f, int m);
std::vector<double> multi_krum(std::span<const ClientUpdate> updates, int f, int m);

// Per-coordinate median; the mean of the middle pair for even counts.
std::vector<double> coordinate_median(std::span<const ClientUpdate> updates);

// DBSCAN-style clustering on a distance matrix with eps = median pairwise
// distance and min_points = floor(n/2) + 1 (a point counts itself).
// Returns labels, -1 for noise.
std::vector<int> density_cluster(const std::vector<std::vector<double>>& dist);
// Cosine distance 1 - cos; two zero vectors are at distance 0, a zero and a
// non-zero vector at distance 1.
std::vector<std::vector<double>> cosine_distance_matrix(std::span<const std::vector<double>> vecs);

// Cluster, clip accepted deltas to their median norm, average, then add
// N(0, (lambda * median_norm)^2) per coordinate.
AggregationResult flame_lite(std::span<const ClientUpdate> updates, double lambda,
                             std::uint64_t noise_seed);

// Clusters the lowest ceil(cutoff * len) orthonormal DCT-II coefficients of
// each delta and averages the accepted deltas.
AggregationResult freqfed_lite(std::span<const ClientUpdate> updates, double cutoff);

// Dispatches on cfg.rule.
AggregationResult aggregate(const AggregatorConfig& cfg, std::span<const ClientUpdate> updates,
                            std::uint64_t noise_seed);

}  // namespace edba
