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

#include <edba/edba.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "rounds": 3, "n_clients": 6, "clients_per_round": 3,
  "dataset": {"train_size": 240, "test_size": 60, "classes": 3},
  "model": {"hidden": [12]},
  "training": {"epochs": 1},
  "attack": {"window": {"stop": 3}, "injection": {"poison_epochs": 1}, "trigger": {"epochs": 2}}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  edba_string_free(s);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("c api: configs") {
  CHECK(std::strlen(edba_version()) > 0);
  edba_config* cfg = nullptr;
  REQUIRE(edba_config_default(&cfg) == EDBA_OK);
  char* hash = nullptr;
  REQUIRE(edba_config_hash(cfg, &hash) == EDBA_OK);
  CHECK(take(hash).size() == 16);
  CHECK(edba_config_set(cfg, "defense.rule=krum") == EDBA_OK);
  char* json = nullptr;
  REQUIRE(edba_config_to_json(cfg, &json) == EDBA_OK);
  CHECK(take(json).find("\"krum\"") != std::string::npos);

  CHECK(edba_config_set(cfg, "defense.bogus=1") == EDBA_ERR_CONFIG);
  CHECK(std::string(edba_last_error()).find("defense.bogus") != std::string::npos);
  const char* pair[] = {"rounds=4", "attack.window.stop=4"};
  CHECK(edba_config_set_all(cfg, pair, 2) == EDBA_OK);
  edba_config_free(cfg);

  edba_config* bad = nullptr;
  CHECK(edba_config_parse(R"({"nope": 1})", &bad) == EDBA_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(edba_config_load("/nonexistent/config.json", &bad) != EDBA_OK);
  CHECK(edba_config_default(nullptr) == EDBA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: run, reload the model, report") {
  const auto dir = fresh_dir("edba_capi_run");
  edba_config* cfg = nullptr;
  REQUIRE(edba_config_parse(kSmall, &cfg) == EDBA_OK);
  REQUIRE(edba_run(cfg, (dir / "a").string().c_str(), 1) == EDBA_OK);
  REQUIRE(edba_run(cfg, (dir / "b").string().c_str(), 2) == EDBA_OK);
  CHECK(slurp(dir / "a" / "rounds.csv") == slurp(dir / "b" / "rounds.csv"));

  edba_model* model = nullptr;
  REQUIRE(edba_model_load((dir / "a" / "final_model.ckpt").string().c_str(), &model) == EDBA_OK);
  CHECK(edba_model_is_text(model) == 0);
  const size_t k = edba_model_classes(model);
  CHECK(k == 3);
  std::vector<double> x(2 * 36, 0.5), logits(2 * k);
  CHECK(edba_model_forward(model, x.data(), 2, 36, logits.data(), logits.size()) == EDBA_OK);
  CHECK(logits[0] == logits[k]);
  CHECK(edba_model_forward(model, x.data(), 2, 35, logits.data(), logits.size()) == EDBA_ERR_SHAPE);
  edba_model_free(model);

  std::string a = (dir / "a").string(), b = (dir / "b").string();
  const char* both[] = {b.c_str(), a.c_str()};
  char* table = nullptr;
  REQUIRE(edba_report(both, 2, &table) == EDBA_OK);
  const std::string t = take(table);
  CHECK(t.find(" a ") != std::string::npos);
  CHECK(t.find(" a ") < t.find(" b "));

  const char* values[] = {"0.1", "0.3"};
  CHECK(edba_sweep(cfg, "scenario.malicious_ratio", values, 2, (dir / "sweep").string().c_str(), 1) == EDBA_OK);
  CHECK(fs::exists(dir / "sweep" / "sweep.csv"));
  CHECK(edba_sweep(cfg, "scenario.malicious_ratio", values, 0, (dir / "sweep2").string().c_str(), 1) != EDBA_OK);

  CHECK(edba_export_dataset(cfg, "test", (dir / "test.csv").string().c_str()) == EDBA_OK);
  CHECK(fs::exists(dir / "test.csv"));
  CHECK(edba_export_dataset(cfg, "valid", (dir / "x.csv").string().c_str()) == EDBA_ERR_INVALID_ARGUMENT);
  edba_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("c api: aggregation") {
  edba_config* cfg = nullptr;
  REQUIRE(edba_config_default(&cfg) == EDBA_OK);
  const double deltas[] = {1, 0, 0, 1, 3, 3};
  const int ids[] = {0, 1, 2};
  double out[2];
  int accepted[3];
  REQUIRE(edba_aggregate(cfg, deltas, ids, 3, 2, 1, out, accepted) == EDBA_OK);
  CHECK(out[0] == doctest::Approx(4.0 / 3));
  CHECK(out[1] == doctest::Approx(4.0 / 3));
  CHECK(accepted[2] == 1);
  REQUIRE(edba_config_set(cfg, "defense.rule=median") == EDBA_OK);
  REQUIRE(edba_aggregate(cfg, deltas, ids, 3, 2, 1, out, nullptr) == EDBA_OK);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 1.0);
  CHECK(edba_aggregate(cfg, nullptr, ids, 3, 2, 1, out, nullptr) == EDBA_ERR_INVALID_ARGUMENT);
  edba_config_free(cfg);
}
