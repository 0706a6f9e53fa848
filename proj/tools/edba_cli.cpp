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

// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edba/edba.h"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--config", c.config, "experiment config (JSON)");
  cmd->add_option("--set", c.sets, "override a field, e.g. --set defense.rule=krum")
      ->take_all()
      ->allow_extra_args(false);
  if (with_out) cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "master seed override")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", c.threads, "client training threads")->check(CLI::PositiveNumber);
}

int report_failure(const char* what) {
  std::fprintf(stderr, "edba: %s: %s\n", what, edba_last_error());
  return 1;
}

// Loads the config (or defaults) and applies --seed and every --set.
edba_config* resolve(const Common& c) {
  edba_config* cfg = nullptr;
  edba_status st = c.config.empty() ? edba_config_default(&cfg)
                                    : edba_config_load(c.config.c_str(), &cfg);
  if (st != EDBA_OK) {
    report_failure("config");
    return nullptr;
  }
  std::vector<std::string> sets = c.sets;
  if (c.seed >= 0) sets.insert(sets.begin(), "seed=" + std::to_string(c.seed));
  std::vector<const char*> raw;
  for (const auto& s : sets) raw.push_back(s.c_str());
  if (edba_config_set_all(cfg, raw.data(), raw.size()) != EDBA_OK) {
    report_failure("--set");
    edba_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

std::string default_out(edba_config* cfg, const char* prefix) {
  const char* root = std::getenv("EDBA_OUT_ROOT");
  std::string base = root && *root ? root : "runs";
  char* hash = nullptr;
  std::string tag = "run";
  if (edba_config_hash(cfg, &hash) == EDBA_OK) {
    tag = hash;
    edba_string_free(hash);
  }
  return base + "/" + prefix + tag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated backdoor simulation: EDBA, baseline attacks and robust aggregation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(edba_version()));

  Common run_opts;
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_opts);

  Common sweep_opts;
  std::string axis;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of a config field");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "dotted config path to vary")->required();
  sweep->add_option("--values", values, "values for the axis")->delimiter(',')->required();

  std::vector<std::string> dirs;
  auto* report = app.add_subcommand("report", "tabulate finished runs");
  report->add_option("runs", dirs, "run directories")->required();

  Common export_opts;
  std::string split = "train";
  auto* exp = app.add_subcommand("export-dataset", "write a dataset split as CSV");
  add_common(exp, export_opts);
  exp->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}));

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    edba_config* cfg = resolve(run_opts);
    if (!cfg) return 1;
    const std::string out = run_opts.out.empty() ? default_out(cfg, "run-") : run_opts.out;
    const auto st = edba_run(cfg, out.c_str(), run_opts.threads);
    edba_config_free(cfg);
    if (st != EDBA_OK) return report_failure("run");
    std::printf("%s\n", out.c_str());
    return 0;
  }
  if (*sweep) {
    edba_config* cfg = resolve(sweep_opts);
    if (!cfg) return 1;
    const std::string out = sweep_opts.out.empty() ? default_out(cfg, "sweep-") : sweep_opts.out;
    std::vector<const char*> v;
    for (const auto& s : values) v.push_back(s.c_str());
    const auto st = edba_sweep(cfg, axis.c_str(), v.data(), v.size(), out.c_str(),
                               sweep_opts.threads);
    edba_config_free(cfg);
    if (st != EDBA_OK) return report_failure("sweep");
    std::printf("%s/sweep.csv\n", out.c_str());
    return 0;
  }
  if (*report) {
    std::vector<const char*> v;
    for (const auto& d : dirs) v.push_back(d.c_str());
    char* table = nullptr;
    if (edba_report(v.data(), v.size(), &table) != EDBA_OK) return report_failure("report");
    std::fputs(table, stdout);
    edba_string_free(table);
    return 0;
  }
  if (*exp) {
    edba_config* cfg = resolve(export_opts);
    if (!cfg) return 1;
    const std::string out = export_opts.out.empty() ? split + ".csv" : export_opts.out;
    const auto st = edba_export_dataset(cfg, split.c_str(), out.c_str());
    edba_config_free(cfg);
    if (st != EDBA_OK) return report_failure("export-dataset");
    std::printf("%s\n", out.c_str());
    return 0;
  }
  return 0;
}
