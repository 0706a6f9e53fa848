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
#include <vector>

namespace edba {

struct RoundRecord {
  int round = 0;
  std::vector<int> selected;   // client ids in dispatch order
  std::vector<int> malicious;  // subset of `selected`
  double ma = 0.0;
  double ba = 0.0;
  std::vector<char> accepted;  // aligned with `selected`
  std::vector<double> scores;  // aligned with `selected`
  bool fallback_noop = false;
  std::uint64_t trigger_version = 0;

  bool malicious_present() const { return !malicious.empty(); }
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct LifespanReport {
  int removal_round = 0;
  int rounds_above = 0;
  double threshold = 90.0;
};

// Consecutive rounds, starting at `removal_round`, whose BA is >= threshold.
LifespanReport lifespan(std::span<const RoundRecord> records, int removal_round,
                        double threshold);

double peak_ba(std::span<const RoundRecord> records);

// Header: round,selected,malicious,ma,ba,accepted,scores,fallback_noop,trigger_version
// List fields are ';'-separated; `accepted` is a string of 0/1 flags.
extern const char* const kRoundsHeader;
std::string rounds_to_csv(std::span<const RoundRecord> records);
std::vector<RoundRecord> rounds_from_csv(std::string_view text);
void write_rounds_csv(const std::string& path, std::span<const RoundRecord> records);
std::vector<RoundRecord> read_rounds_csv(const std::string& path);

struct Summary {
  int rounds = 0;
  double final_ma = 0.0;
  double final_ba = 0.0;
  double peak_ba = 0.0;
  LifespanReport lifespan;
};

Summary summarize(std::span<const RoundRecord> records, int removal_round, double threshold);
// Stable key order and number formatting.
std::string summary_to_json(const Summary& s, const std::string& config_hash,
                            std::uint64_t seed);

}  // namespace edba
