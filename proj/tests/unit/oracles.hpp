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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Central difference (f(x+h) - f(x-h)) / 2h along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// |a - b| <= rtol * max(|a|, |b|, floor). The floor keeps coordinates whose
// true gradient is ~0 from turning round-off into relative error.
inline bool close_relative(double a, double b, double rtol, double floor = 1e-7) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) <= rtol * scale;
}

// X_k = s_k * sum_n x_n cos(pi k (2n+1) / 2N), orthonormal scaling.
inline std::vector<double> naive_dct2(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(kPi * static_cast<double>(k) * (2.0 * i + 1.0) / (2.0 * n));
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Krum score by enumerating every neighbour subset of size n - f - 2 (at
// least 1) and keeping the cheapest.
inline std::vector<double> brute_krum_scores(const std::vector<std::vector<double>>& pts, int f) {
  const int n = static_cast<int>(pts.size());
  const int k = std::max(1, n - f - 2);
  std::vector<double> scores(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    const int m = static_cast<int>(others.size());
    const int kk = std::min(k, m);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (__builtin_popcount(mask) != kk) continue;
      double s = 0.0;
      for (int b = 0; b < m; ++b)
        if (mask & (1u << b)) s += sq_dist(pts[i], pts[others[b]]);
      scores[i] = std::min(scores[i], s);
    }
  }
  return scores;
}

// Lowest score; equal scores resolved by the smaller id.
inline std::size_t argmin_by_id(const std::vector<double>& scores, const std::vector<int>& ids) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best] || (scores[i] == scores[best] && ids[i] < ids[best])) best = i;
  return best;
}

// Repeated Krum: pick, remove, rescore the survivors.
inline std::vector<std::size_t> brute_multi_krum(const std::vector<std::vector<double>>& pts,
                                                 const std::vector<int>& ids, int f, int m) {
  std::vector<std::size_t> alive(pts.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<std::size_t> chosen;
  while (static_cast<int>(chosen.size()) < m && !alive.empty()) {
    std::vector<std::vector<double>> sub;
    std::vector<int> sub_ids;
    for (auto a : alive) {
      sub.push_back(pts[a]);
      sub_ids.push_back(ids[a]);
    }
    const std::size_t pick = alive.size() == 1 ? 0 : argmin_by_id(brute_krum_scores(sub, f), sub_ids);
    chosen.push_back(alive[pick]);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chosen;
}

inline std::vector<double> sorted_median(const std::vector<std::vector<double>>& pts) {
  const std::size_t d = pts.front().size();
  std::vector<double> out(d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> col;
    for (const auto& p : pts) col.push_back(p[c]);
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    out[c] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return out;
}

}  // namespace oracle
