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
#include <span>
#include <string>
#include <vector>

namespace edba {

struct ParamSlot {
  std::string name;
  std::size_t offset = 0;
  std::vector<std::size_t> shape;

  std::size_t size() const;
  friend bool operator==(const ParamSlot&, const ParamSlot&) = default;
};

// A model's parameters as one contiguous vector plus a named layout. This is
// the unit exchanged between clients and the server.
class FlatParams {
 public:
  FlatParams() = default;

  // Appends a zero-initialised slot at the current end of the vector.
  std::size_t add_slot(std::string name, std::vector<std::size_t> shape);

  const ParamSlot& slot(std::string_view name) const;
  std::span<double> view(const ParamSlot& s) { return {data_.data() + s.offset, s.size()}; }
  std::span<const double> view(const ParamSlot& s) const {
    return {data_.data() + s.offset, s.size()};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<ParamSlot>& layout() const { return layout_; }
  std::size_t size() const { return data_.size(); }

  bool same_layout(const FlatParams& other) const { return layout_ == other.layout_; }
  bool all_finite() const;

  // Same layout, all values zero.
  FlatParams zeros_like() const;

  // Builds params from a layout table; validates contiguity.
  static FlatParams from_layout(std::vector<ParamSlot> layout, std::vector<double> data);

  friend bool operator==(const FlatParams&, const FlatParams&) = default;

 private:
  std::vector<double> data_;
  std::vector<ParamSlot> layout_;
};

void require_same_layout(const FlatParams& a, const FlatParams& b, const char* what);

// Flat-vector helpers used throughout aggregation and attack code.
double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double l2_distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
std::vector<double> subtract(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace edba
