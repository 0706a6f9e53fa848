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

#include "nn/tensor.hpp"

#include <cmath>

#include "common/error.hpp"

namespace edba {

Tensor::Tensor(std::vector<std::size_t> shp, std::vector<double> values)
    : shape(std::move(shp)), data(std::move(values)) {
  require(element_count(shape) == data.size(), ErrorCode::shape_mismatch,
          "tensor data length " + std::to_string(data.size()) +
              " does not match shape " + shape_string());
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

}  // namespace edba
