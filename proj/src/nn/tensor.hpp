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

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace edba {

// Row-major dense array of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shp, double fill = 0.0)
      : shape(std::move(shp)), data(element_count(shape), fill) {}
  Tensor(std::vector<std::size_t> shp, std::vector<double> values);

  static std::size_t element_count(const std::vector<std::size_t>& shp) {
    return std::accumulate(shp.begin(), shp.end(), std::size_t{1},
                           std::multiplies<>());
  }

  // 2-D accessors; a 1-D tensor is treated as a single row.
  std::size_t rows() const { return shape.size() >= 2 ? shape[0] : 1; }
  std::size_t cols() const { return shape.empty() ? 0 : shape.back(); }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols(), cols()};
  }

  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  std::size_t size() const { return data.size(); }
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace edba
