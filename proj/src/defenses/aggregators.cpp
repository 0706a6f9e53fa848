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

#include "defenses/aggregators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "defenses/dct.hpp"

namespace edba {

AggregationRule parse_rule(std::string_view s) {
  if (s == "fedavg") return AggregationRule::fedavg;
  if (s == "ndc") return AggregationRule::ndc;
  if (s == "krum") return AggregationRule::krum;
  if (s == "multikrum") return AggregationRule::multikrum;
  if (s == "median") return AggregationRule::median;
  if (s == "flame") return AggregationRule::flame;
  if (s == "freqfed") return AggregationRule::freqfed;
  fail(ErrorCode::invalid_argument, "unknown aggregation rule: " + std::string(s));
}

std::string to_string(AggregationRule r) {
  switch (r) {
    case AggregationRule::fedavg: return "fedavg";
    case AggregationRule::ndc: return "ndc";
    case AggregationRule::krum: return "krum";
    case AggregationRule::multikrum: return "multikrum";
    case AggregationRule::median: return "median";
    case AggregationRule::flame: return "flame";
    case AggregationRule::freqfed: return "freqfed";
  }
  return "fedavg";
}

namespace {

void check_updates(std::span<const ClientUpdate> updates, std::size_t min_count, const char* who) {
  require(updates.size() >= min_count, ErrorCode::invalid_argument,
          std::string(who) + ": needs at least " + std::to_string(min_count) + " update(s)");
  for (const auto& u : updates)
    require(u.delta.size() == updates.front().delta.size(), ErrorCode::shape_mismatch,
            std::string(who) + ": update lengths differ");
}

std::vector<double> mean_of(std::span<const ClientUpdate> updates,
                            const std::vector<std::size_t>& which) {
  std::vector<double> out(updates.front().delta.size(), 0.0);
  if (which.empty()) return out;
  for (auto i : which) axpy(1.0, updates[i].delta.data(), out);
  const double inv = 1.0 / static_cast<double>(which.size());
  for (double& v : out) v *= inv;
  return out;
}

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Lowest score wins; equal scores resolve to the lower client id.
std::size_t argmin_by_id(std::span<const ClientUpdate> updates, const std::vector<double>& scores,
                         const std::vector<std::size_t>& candidates) {
  std::size_t best = candidates.front();
  for (auto c : candidates) {
    if (scores[c] < scores[best] ||
        (scores[c] == scores[best] && updates[c].client_id < updates[best].client_id))
      best = c;
  }
  return best;
}

std::vector<double> krum_scores_subset(std::span<const ClientUpdate> updates,
                                       const std::vector<std::size_t>& subset, int f,
                                       std::size_t n_scores) {
  std::vector<double> scores(n_scores, 0.0);
  const std::size_t n = subset.size();
  if (n <= 1) return scores;
  const long k_raw = static_cast<long>(n) - f - 2;
  const std::size_t k = static_cast<std::size_t>(std::clamp<long>(k_raw, 1, static_cast<long>(n) - 1));
  for (auto i : subset) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (auto j : subset)
      if (j != i) d.push_back(squared_distance(updates[i].delta.data(), updates[j].delta.data()));
    std::sort(d.begin(), d.end());
    scores[i] = std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  }
  return scores;
}

}  // namespace

std::vector<double> mean_delta(std::span<const ClientUpdate> updates) {
  check_updates(updates, 1, "fedavg");
  return mean_of(updates, all_positions(updates.size()));
}

FlatParams fedavg(const FlatParams& global, std::span<const ClientUpdate> updates) {
  auto d = mean_delta(updates);
  require(d.size() == global.size(), ErrorCode::shape_mismatch, "fedavg: update length mismatch");
  FlatParams out = global;
  axpy(1.0, d, out.data());
  return out;
}

std::vector<ClientUpdate> norm_clip(std::span<const ClientUpdate> updates, double threshold) {
  require(threshold > 0.0, ErrorCode::invalid_argument, "clip norm must be positive");
  std::vector<ClientUpdate> out(updates.begin(), updates.end());
  for (auto& u : out) {
    const double n = l2_norm(u.delta.data());
    if (n > threshold) {
      const double s = threshold / n;
      for (double& v : u.delta.data()) v *= s;
    }
  }
  return out;
}

std::vector<double> krum_scores(std::span<const ClientUpdate> updates, int f) {
  check_updates(updates, 2, "krum");
  return krum_scores_subset(updates, all_positions(updates.size()), f, updates.size());
}

std::size_t krum(std::span<const ClientUpdate> updates, int f) {
  auto scores = krum_scores(updates, f);
  return argmin_by_id(updates, scores, all_positions(updates.size()));
}

std::vector<std::size_t> multi_krum_select(std::span<const ClientUpdate> updates, int f, int m) {
  check_updates(updates, 2, "multi-krum");
  require(m >= 1 && static_cast<std::size_t>(m) <= updates.size(), ErrorCode::invalid_argument,
          "multi-krum m must lie in [1, number of updates]");
  std::vector<std::size_t> remaining = all_positions(updates.size());
  std::vector<std::size_t> chosen;
  while (chosen.size() < static_cast<std::size_t>(m)) {
    auto scores = krum_scores_subset(updates, remaining, f, updates.size());
    const auto pick = argmin_by_id(updates, scores, remaining);
    chosen.push_back(pick);
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
  }
  return chosen;
}

std::vector<double> multi_krum(std::span<const ClientUpdate> updates, int f, int m) {
  auto chosen = multi_krum_select(updates, f, m);
  std::sort(chosen.begin(), chosen.end());
  return mean_of(updates, chosen);
}

std::vector<double> coordinate_median(std::span<const ClientUpdate> updates) {
  check_updates(updates, 1, "median");
  const std::size_t n = updates.size(), dim = updates.front().delta.size();
  std::vector<double> out(dim), column(n);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i].delta.data()[j];
    std::sort(column.begin(), column.end());
    out[j] = n % 2 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

std::vector<std::vector<double>> cosine_distance_matrix(std::span<const std::vector<double>> vecs) {
  const std::size_t n = vecs.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = l2_norm(vecs[i]);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist;
      if (norms[i] == 0.0 && norms[j] == 0.0) dist = 0.0;
      else if (norms[i] == 0.0 || norms[j] == 0.0) dist = 1.0;
      else dist = 1.0 - dot(vecs[i], vecs[j]) / (norms[i] * norms[j]);
      d[i][j] = d[j][i] = std::max(0.0, dist);
    }
  return d;
}

std::vector<int> density_cluster(const std::vector<std::vector<double>>& dist) {
  const std::size_t n = dist.size();
  std::vector<int> labels(n, -1);
  if (n == 0) return labels;
  if (n == 1) {
    labels[0] = 0;
    return labels;
  }
  std::vector<double> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back(dist[i][j]);
  std::sort(pairs.begin(), pairs.end());
  const std::size_t p = pairs.size();
  const double eps = p % 2 ? pairs[p / 2] : 0.5 * (pairs[p / 2 - 1] + pairs[p / 2]);
  const std::size_t min_points = n / 2 + 1;
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (dist[i][j] <= eps) nbrs[i].push_back(j);
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_points;
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != -1) continue;
    std::vector<std::size_t> stack{i};
    labels[i] = next;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (!core[u]) continue;
      for (auto v : nbrs[u]) {
        if (labels[v] != -1) continue;
        labels[v] = next;
        stack.push_back(v);
      }
    }
    ++next;
  }
  return labels;
}

namespace {

// Members of the largest cluster; equal sizes resolve to the cluster holding
// the lowest client id.
std::vector<std::size_t> largest_cluster(std::span<const ClientUpdate> updates,
                                         const std::vector<int>& labels) {
  int clusters = 0;
  for (int l : labels) clusters = std::max(clusters, l + 1);
  std::vector<std::size_t> best;
  int best_min_id = 0;
  for (int c = 0; c < clusters; ++c) {
    std::vector<std::size_t> members;
    int min_id = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) {
        if (members.empty() || updates[i].client_id < min_id) min_id = updates[i].client_id;
        members.push_back(i);
      }
    if (members.size() > best.size() || (members.size() == best.size() && min_id < best_min_id)) {
      best = std::move(members);
      best_min_id = min_id;
    }
  }
  return best;
}

std::vector<std::vector<double>> raw_deltas(std::span<const ClientUpdate> updates) {
  std::vector<std::vector<double>> v;
  v.reserve(updates.size());
  for (const auto& u : updates) v.push_back(u.delta.data());
  return v;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AggregationResult flame_lite(std::span<const ClientUpdate> updates, double lambda,
                             std::uint64_t noise_seed) {
  check_updates(updates, 1, "flame");
  require(lambda >= 0.0, ErrorCode::invalid_argument, "flame lambda must be non-negative");
  const std::size_t n = updates.size(), dim = updates.front().delta.size();
  AggregationResult res;
  auto& diag = res.diagnostics;
  const auto deltas = raw_deltas(updates);
  diag.clusters = density_cluster(cosine_distance_matrix(deltas));
  const auto accepted = largest_cluster(updates, diag.clusters);
  diag.accepted.assign(n, 0);
  diag.scores.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) diag.scores[i] = l2_norm(deltas[i]);
  res.delta.assign(dim, 0.0);
  if (accepted.empty()) {
    diag.fallback_noop = true;
    diag.warnings.push_back("flame: every update rejected, round skipped");
    return res;
  }
  std::vector<double> norms;
  for (auto i : accepted) {
    diag.accepted[i] = 1;
    norms.push_back(diag.scores[i]);
  }
  const double clip = median_of(norms);
  for (auto i : accepted) {
    const double s = diag.scores[i] > clip ? clip / diag.scores[i] : 1.0;
    axpy(s, deltas[i], res.delta);
  }
  const double inv = 1.0 / static_cast<double>(accepted.size());
  for (double& v : res.delta) v *= inv;
  const double sigma = lambda * clip;
  if (sigma > 0.0) {
    Rng rng(noise_seed);
    for (double& v : res.delta) v += sigma * standard_normal(rng);
  }
  return res;
}

AggregationResult freqfed_lite(std::span<const ClientUpdate> updates, double cutoff) {
  check_updates(updates, 1, "freqfed");
  require(cutoff > 0.0 && cutoff <= 1.0, ErrorCode::invalid_argument,
          "freqfed cutoff must lie in (0,1]");
  const std::size_t n = updates.size(), dim = updates.front().delta.size();
  const auto keep = static_cast<std::size_t>(std::ceil(cutoff * static_cast<double>(dim)));
  std::vector<std::vector<double>> prints;
  prints.reserve(n);
  AggregationResult res;
  auto& diag = res.diagnostics;
  for (const auto& u : updates) {
    auto c = dct2_orthonormal(u.delta.data());
    c.resize(std::min(keep, c.size()));
    diag.scores.push_back(l2_norm(c));
    prints.push_back(std::move(c));
  }
  diag.clusters = density_cluster(cosine_distance_matrix(prints));
  auto accepted = largest_cluster(updates, diag.clusters);
  diag.accepted.assign(n, 0);
  for (auto i : accepted) diag.accepted[i] = 1;
  if (accepted.empty()) {
    diag.fallback_noop = true;
    diag.warnings.push_back("freqfed: every update rejected, round skipped");
    res.delta.assign(dim, 0.0);
    return res;
  }
  std::sort(accepted.begin(), accepted.end());
  res.delta = mean_of(updates, accepted);
  return res;
}

AggregationResult aggregate(const AggregatorConfig& cfg, std::span<const ClientUpdate> updates,
                            std::uint64_t noise_seed) {
  check_updates(updates, 1, "aggregate");
  const std::size_t n = updates.size();
  AggregationResult res;
  auto& diag = res.diagnostics;
  switch (cfg.rule) {
    case AggregationRule::fedavg:
      res.delta = mean_delta(updates);
      diag.accepted.assign(n, 1);
      for (const auto& u : updates) diag.scores.push_back(l2_norm(u.delta.data()));
      return res;
    case AggregationRule::ndc: {
      for (const auto& u : updates) diag.scores.push_back(l2_norm(u.delta.data()));
      auto clipped = norm_clip(updates, cfg.clip_norm);
      res.delta = mean_delta(clipped);
      diag.accepted.assign(n, 1);
      return res;
    }
    case AggregationRule::krum:
    case AggregationRule::multikrum: {
      if (n < 2 * static_cast<std::size_t>(cfg.krum_f) + 3)
        diag.warnings.push_back("krum: fewer than 2f+3 updates");
      diag.scores = krum_scores(updates, cfg.krum_f);
      diag.accepted.assign(n, 0);
      if (cfg.rule == AggregationRule::krum) {
        const auto pick = krum(updates, cfg.krum_f);
        diag.accepted[pick] = 1;
        res.delta = updates[pick].delta.data();
      } else {
        const int m = std::min<int>(cfg.multikrum_m, static_cast<int>(n));
        for (auto i : multi_krum_select(updates, cfg.krum_f, m)) diag.accepted[i] = 1;
        res.delta = multi_krum(updates, cfg.krum_f, m);
      }
      return res;
    }
    case AggregationRule::median:
      res.delta = coordinate_median(updates);
      diag.accepted.assign(n, 1);
      for (const auto& u : updates) diag.scores.push_back(l2_norm(u.delta.data()));
      return res;
    case AggregationRule::flame:
      return flame_lite(updates, cfg.flame_lambda, noise_seed);
    case AggregationRule::freqfed:
      return freqfed_lite(updates, cfg.freqfed_cutoff);
  }
  fail(ErrorCode::internal, "unhandled aggregation rule");
}

}  // namespace edba
