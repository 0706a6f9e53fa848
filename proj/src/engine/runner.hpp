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

#include <span>
#include <string>
#include <vector>

#include "engine/experiment.hpp"

namespace edba {

// Files written by run_to_directory, relative to the run directory.
struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string config_file = "config.json";
  std::string rounds_file = "rounds.csv";
  std::string timing_file = "timing.csv";
  std::string summary_file = "summary.json";
  std::string model_file = "final_model.ckpt";
  std::string trigger_file = "trigger.bin";
};

std::string manifest_to_json(const RunManifest& m);

// Runs the experiment and writes config, manifest, per-round CSV, wall-time
// CSV, summary, final checkpoint and trigger snapshot into `out_dir`.
RunManifest run_to_directory(const ExperimentConfig& cfg, const std::string& out_dir,
                             const RunOptions& opts);

// Seed used for one sweep value: the master seed mixed with a hash of the
// value text, unless the axis is the seed itself.
std::uint64_t sweep_seed(std::uint64_t master, std::string_view axis, std::string_view value);

struct SweepRow {
  std::string value;
  std::string dir;
  std::uint64_t seed = 0;
  std::string config_hash;
  Summary summary;
};

// One run per value under `<out_dir>/<axis>=<value>`, plus `sweep.csv`.
std::vector<SweepRow> sweep_to_directory(const ExperimentConfig& cfg, const std::string& axis,
                                         std::span<const std::string> values,
                                         const std::string& out_dir, const RunOptions& opts);

struct ReportRow {
  std::string run;
  Summary summary;
};

// Reads each run directory's config and rounds CSV; rows are sorted by
// directory name.
std::vector<ReportRow> collect_report(std::span<const std::string> run_dirs);
std::string format_report(std::span<const ReportRow> rows);

}  // namespace edba
