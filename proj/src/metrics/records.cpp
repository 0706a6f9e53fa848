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

#include "metrics/records.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/format.hpp"

namespace edba {

const char* const kRoundsHeader =
    "round,selected,malicious,ma,ba,accepted,scores,fallback_noop,trigger_version";

LifespanReport lifespan(std::span<const RoundRecord> records, int removal_round,
                        double threshold) {
  LifespanReport rep{removal_round, 0, threshold};
  auto it = std::find_if(records.begin(), records.end(),
                         [&](const RoundRecord& r) { return r.round == removal_round; });
  for (; it != records.end() && it->ba >= threshold; ++it) ++rep.rounds_above;
  return rep;
}

double peak_ba(std::span<const RoundRecord> records) {
  double p = 0.0;
  for (const auto& r : records) p = std::max(p, r.ba);
  return p;
}

namespace {

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = s.find(sep, begin);
    out.emplace_back(s.substr(begin, pos == std::string_view::npos ? pos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

template <class Int = long long>
Int parse_int(const std::string& s) {
  Int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: " + s);
  return v;
}

}  // namespace

std::string rounds_to_csv(std::span<const RoundRecord> records) {
  std::string out = kRoundsHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.round) + ',';
    out += join(r.selected, [](int v) { return std::to_string(v); }) + ',';
    out += join(r.malicious, [](int v) { return std::to_string(v); }) + ',';
    out += format_double(r.ma) + ',' + format_double(r.ba) + ',';
    for (char a : r.accepted) out += a ? '1' : '0';
    out += ',';
    out += join(r.scores, [](double v) { return format_double(v); }) + ',';
    out += r.fallback_noop ? "1," : "0,";
    out += std::to_string(r.trigger_version) + '\n';
  }
  return out;
}

std::vector<RoundRecord> rounds_from_csv(std::string_view text) {
  std::vector<RoundRecord> out;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  require(!lines.empty() && lines.front() == kRoundsHeader, ErrorCode::io,
          "rounds CSV: missing or unexpected header");
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    const std::string where = "rounds CSV line " + std::to_string(li + 1);
    require(f.size() == 9, ErrorCode::io, where + ": expected 9 fields");
    RoundRecord r;
    try {
      r.round = static_cast<int>(parse_int(f[0]));
      if (!f[1].empty())
        for (const auto& s : split(f[1], ';')) r.selected.push_back(static_cast<int>(parse_int(s)));
      if (!f[2].empty())
        for (const auto& s : split(f[2], ';')) r.malicious.push_back(static_cast<int>(parse_int(s)));
      r.ma = parse_double(f[3]);
      r.ba = parse_double(f[4]);
      for (char ch : f[5]) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("bad accepted flag");
        r.accepted.push_back(ch == '1');
      }
      if (!f[6].empty())
        for (const auto& s : split(f[6], ';')) r.scores.push_back(parse_double(s));
      if (f[7] != "0" && f[7] != "1") throw std::invalid_argument("bad fallback flag");
      r.fallback_noop = f[7] == "1";
      r.trigger_version = parse_int<std::uint64_t>(f[8]);
    } catch (const std::invalid_argument& e) {
      fail(ErrorCode::io, where + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_rounds_csv(const std::string& path, std::span<const RoundRecord> records) {
  ByteWriter w;
  w.bytes(rounds_to_csv(records));
  w.write_file(path);
}

std::vector<RoundRecord> read_rounds_csv(const std::string& path) {
  return rounds_from_csv(read_file(path));
}

Summary summarize(std::span<const RoundRecord> records, int removal_round, double threshold) {
  Summary s;
  s.rounds = static_cast<int>(records.size());
  if (!records.empty()) {
    s.final_ma = records.back().ma;
    s.final_ba = records.back().ba;
  }
  s.peak_ba = peak_ba(records);
  s.lifespan = lifespan(records, removal_round, threshold);
  return s;
}

std::string summary_to_json(const Summary& s, const std::string& config_hash,
                            std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["rounds"] = s.rounds;
  j["final_ma"] = s.final_ma;
  j["final_ba"] = s.final_ba;
  j["peak_ba"] = s.peak_ba;
  j["lifespan"] = {{"removal_round", s.lifespan.removal_round},
                   {"rounds_above", s.lifespan.rounds_above},
                   {"threshold", s.lifespan.threshold}};
  return j.dump(2) + "\n";
}

}  // namespace edba
