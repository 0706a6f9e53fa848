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
#include <string_view>
#include <vector>

namespace edba {

// Little-endian byte buffer used by every snapshot format in the project.
std::string read_file(const std::string& path);

class ByteWriter {
 public:
  void bytes(std::string_view raw);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);  // u32 length prefix + UTF-8 bytes
  void f64_array(std::span<const double> values);

  const std::string& buffer() const { return buf_; }
  void write_file(const std::string& path) const;

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}
  static ByteReader from_file(const std::string& path);

  void expect_magic(std::string_view magic);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64_array(std::size_t n);
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace edba
