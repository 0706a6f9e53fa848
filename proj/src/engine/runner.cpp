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

#include "engine/runner.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/format.hpp"

namespace fs = std::filesystem;

namespace edba {

namespace {

void write_text(const fs::path& path, const std::string& text) {
  ByteWriter w;
  w.bytes(text);
  w.write_file(path.string());
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir;
  j["artifacts"] = {{"config", m.config_file},     {"rounds", m.rounds_file},
                    {"timing", m.timing_file},     {"summary", m.summary_file},
                    {"model", m.model_file},       {"trigger", m.trigger_file}};
  return j.dump(2) + "\n";
}

RunManifest run_to_directory(const ExperimentConfig& cfg, const std::string& out_dir,
                             const RunOptions& opts) {
  validate(cfg);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + out_dir + ": " + ec.message());

  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.out_dir = out_dir;
  write_text(dir / m.config_file, config_to_json(cfg) + "\n");

  RunOptions o = opts;
  if (o.dump_dir.empty()) o.dump_dir = out_dir;
  const auto res = run_experiment(cfg, o);

  write_rounds_csv((dir / m.rounds_file).string(), res.records);
  std::string timing = "round,wall_seconds\n";
  for (std::size_t i = 0; i < res.wall_seconds.size(); ++i)
    timing += std::to_string(i) + ',' + format_double(res.wall_seconds[i]) + '\n';
  write_text(dir / m.timing_file, timing);
  const auto s = summarize(res.records, cfg.attack.window_stop, cfg.metrics.lifespan_threshold);
  write_text(dir / m.summary_file, summary_to_json(s, m.config_hash, cfg.seed));
  save_checkpoint((dir / m.model_file).string(), res.final_model);
  save_trigger((dir / m.trigger_file).string(), res.trigger);
  write_text(dir / "manifest.json", manifest_to_json(m));
  return m;
}

std::uint64_t sweep_seed(std::uint64_t master, std::string_view axis, std::string_view value) {
  if (axis == "seed") return nlohmann::json::parse(value).get<std::uint64_t>();
  return derive_seed(master, {fnv1a(value)});
}

std::vector<SweepRow> sweep_to_directory(const ExperimentConfig& cfg, const std::string& axis,
                                         std::span<const std::string> values,
                                         const std::string& out_dir, const RunOptions& opts) {
  require(!values.empty(), ErrorCode::invalid_argument, "sweep needs at least one value");
  require(!axis.empty(), ErrorCode::invalid_argument, "sweep needs an axis");
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    auto c = apply_override(cfg, axis + "=" + v);
    c.seed = sweep_seed(cfg.seed, axis, v);
    SweepRow row;
    row.value = v;
    row.dir = (fs::path(out_dir) / (axis + "=" + v)).string();
    row.seed = c.seed;
    row.config_hash = config_hash(c);
    run_to_directory(c, row.dir, opts);
    const auto recs = read_rounds_csv((fs::path(row.dir) / "rounds.csv").string());
    row.summary = summarize(recs, c.attack.window_stop, c.metrics.lifespan_threshold);
    rows.push_back(std::move(row));
  }
  std::string csv = "axis,value,seed,config_hash,final_ma,final_ba,peak_ba,lifespan\n";
  for (const auto& r : rows)
    csv += axis + ',' + r.value + ',' + std::to_string(r.seed) + ',' + r.config_hash + ',' +
           format_double(r.summary.final_ma) + ',' + format_double(r.summary.final_ba) + ',' +
           format_double(r.summary.peak_ba) + ',' +
           std::to_string(r.summary.lifespan.rounds_above) + '\n';
  write_text(fs::path(out_dir) / "sweep.csv", csv);
  return rows;
}

std::vector<ReportRow> collect_report(std::span<const std::string> run_dirs) {
  require(!run_dirs.empty(), ErrorCode::invalid_argument, "report needs at least one run directory");
  std::vector<std::string> dirs(run_dirs.begin(), run_dirs.end());
  std::sort(dirs.begin(), dirs.end());
  std::vector<ReportRow> rows;
  for (const auto& d : dirs) {
    const fs::path dir(d);
    const auto rounds = dir / "rounds.csv";
    require(fs::exists(rounds), ErrorCode::io, "missing " + rounds.string());
    const auto cfg = load_config((dir / "config.json").string());
    const auto recs = read_rounds_csv(rounds.string());
    rows.push_back({dir.filename().empty() ? d : dir.filename().string(),
                    summarize(recs, cfg.attack.window_stop, cfg.metrics.lifespan_threshold)});
  }
  return rows;
}

std::string format_report(std::span<const ReportRow> rows) {
  std::size_t w = 3;
  for (const auto& r : rows) w = std::max(w, r.run.size());
  auto pad = [](std::string s, std::size_t n) {
    if (s.size() < n) s.insert(0, n - s.size(), ' ');
    return s;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::string out = pad("run", w) + "  rounds  final_ma  final_ba   peak_ba  lifespan\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out += pad(r.run, w) + pad(std::to_string(s.rounds), 8) + pad(num(s.final_ma), 10) +
           pad(num(s.final_ba), 10) + pad(num(s.peak_ba), 10) +
           pad(std::to_string(s.lifespan.rounds_above), 10) + "\n";
  }
  return out;
}

}  // namespace edba
