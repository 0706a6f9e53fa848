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

#include "common/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace edba {

void ByteWriter::bytes(std::string_view raw) { buf_.append(raw); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void ByteWriter::f64_array(std::span<const double> values) {
  for (double v : values) f64(v);
}

void ByteWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open for writing: " + path);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  require(static_cast<bool>(out), ErrorCode::io, "write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ByteReader ByteReader::from_file(const std::string& path) { return ByteReader(read_file(path)); }

void ByteReader::need(std::size_t n) const {
  require(data_.size() - pos_ >= n, ErrorCode::io, "truncated binary file");
}

void ByteReader::expect_magic(std::string_view magic) {
  need(magic.size());
  require(std::string_view(data_).substr(pos_, magic.size()) == magic, ErrorCode::io,
          "bad magic, expected " + std::string(magic));
  pos_ += magic.size();
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  auto n = u32();
  need(n);
  std::string s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::vector<double> ByteReader::f64_array(std::size_t n) {
  need(n * 8);
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

}  // namespace edba
