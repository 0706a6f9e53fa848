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

#include "defenses/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace edba {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> run_r2r(std::span<const double> in, fftw_r2r_kind kind) {
  const int n = static_cast<int>(in.size());
  std::vector<double> src(in.begin(), in.end());
  std::vector<double> dst(in.size());
  std::lock_guard lock(planner_mutex());
  fftw_plan plan = fftw_plan_r2r_1d(n, src.data(), dst.data(), kind, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return dst;
}

}  // namespace

std::vector<double> dct2_orthonormal(std::span<const double> x) {
  if (x.empty()) return {};
  auto y = run_r2r(x, FFTW_REDFT10);
  const double n = static_cast<double>(x.size());
  y[0] *= std::sqrt(1.0 / (4.0 * n));
  for (std::size_t k = 1; k < y.size(); ++k) y[k] *= std::sqrt(1.0 / (2.0 * n));
  return y;
}

std::vector<double> idct2_orthonormal(std::span<const double> coeffs) {
  if (coeffs.empty()) return {};
  const double n = static_cast<double>(coeffs.size());
  std::vector<double> y(coeffs.begin(), coeffs.end());
  y[0] *= std::sqrt(1.0 / n);
  for (std::size_t k = 1; k < y.size(); ++k) y[k] *= 1.0 / std::sqrt(2.0 * n);
  return run_r2r(y, FFTW_REDFT01);
}

}  // namespace edba
