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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "rounds": 3, "n_clients": 6, "clients_per_round": 3,
  "dataset": {"train_size": 240, "test_size": 60, "classes": 3},
  "model": {"hidden": [12]},
  "training": {"epochs": 1},
  "attack": {"window": {"stop": 3}, "injection": {"poison_epochs": 1}, "trigger": {"epochs": 2}}
})";

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = std::string(EDBA_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("cli: run, override, sweep, report, export") {
  const auto dir = fs::temp_directory_path() / "edba_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "small.json";
  std::ofstream(cfg) << kSmall;

  auto missing = cli("run --config " + (dir / "absent.json").string(), dir);
  CHECK(missing.status != 0);
  CHECK_FALSE(missing.err.empty());

  auto ok = cli("run --config " + cfg.string() + " --out " + (dir / "run").string(), dir);
  CHECK(ok.status == 0);
  const std::string rounds = slurp(dir / "run" / "rounds.csv");
  CHECK(std::count(rounds.begin(), rounds.end(), '\n') == 4);

  auto krum = cli("run --config " + cfg.string() + " --set defense.rule=krum --out " +
                      (dir / "krum").string(), dir);
  CHECK(krum.status == 0);
  CHECK(slurp(dir / "krum" / "config.json").find("\"krum\"") != std::string::npos);
  CHECK(slurp(dir / "krum" / "manifest.json") != slurp(dir / "run" / "manifest.json"));

  CHECK(cli("run --config " + cfg.string() + " --set defense.nope=1 --out " + (dir / "bad").string(), dir)
            .status != 0);

  auto sweep = cli("sweep --config " + cfg.string() + " --axis scenario.malicious_ratio --values 0.05,0.25 --out " +
                       (dir / "sweep").string(), dir);
  CHECK(sweep.status == 0);
  CHECK(fs::exists(dir / "sweep" / "scenario.malicious_ratio=0.05" / "rounds.csv"));
  CHECK(fs::exists(dir / "sweep" / "sweep.csv"));

  auto report = cli("report " + (dir / "run").string() + " " + (dir / "krum").string(), dir);
  CHECK(report.status == 0);
  CHECK(report.out.find("krum") != std::string::npos);
  CHECK(cli("report " + (dir / "absent").string(), dir).status != 0);

  auto exp = cli("export-dataset --config " + cfg.string() + " --split test --out " +
                     (dir / "test.csv").string(), dir);
  CHECK(exp.status == 0);
  CHECK(fs::exists(dir / "test.csv"));
  fs::remove_all(dir);
}
