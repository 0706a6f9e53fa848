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

#include "nn/params.hpp"

#include <cmath>

#include "common/error.hpp"
#include "nn/tensor.hpp"

namespace edba {

std::size_t ParamSlot::size() const { return Tensor::element_count(shape); }

std::size_t FlatParams::add_slot(std::string name, std::vector<std::size_t> shape) {
  ParamSlot s{std::move(name), data_.size(), std::move(shape)};
  data_.resize(data_.size() + s.size(), 0.0);
  layout_.push_back(std::move(s));
  return layout_.size() - 1;
}

const ParamSlot& FlatParams::slot(std::string_view name) const {
  for (const auto& s : layout_)
    if (s.name == name) return s;
  fail(ErrorCode::invalid_argument, "no parameter slot named " + std::string(name));
}

bool FlatParams::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

FlatParams FlatParams::zeros_like() const {
  FlatParams z;
  z.layout_ = layout_;
  z.data_.assign(data_.size(), 0.0);
  return z;
}

FlatParams FlatParams::from_layout(std::vector<ParamSlot> layout, std::vector<double> data) {
  std::size_t expect = 0;
  for (const auto& s : layout) {
    require(s.offset == expect, ErrorCode::shape_mismatch,
            "layout slot " + s.name + " is not contiguous");
    expect += s.size();
  }
  require(expect == data.size(), ErrorCode::shape_mismatch,
          "layout covers " + std::to_string(expect) + " values but data has " +
              std::to_string(data.size()));
  FlatParams p;
  p.layout_ = std::move(layout);
  p.data_ = std::move(data);
  return p;
}

void require_same_layout(const FlatParams& a, const FlatParams& b, const char* what) {
  require(a.same_layout(b), ErrorCode::shape_mismatch,
          std::string(what) + ": parameter layouts differ");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace edba
