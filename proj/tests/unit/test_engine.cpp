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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "engine/config.hpp"
#include "engine/experiment.hpp"
#include "engine/runner.hpp"
#include "engine/selection.hpp"
#include "engine/workload.hpp"
#include "metrics/records.hpp"

using namespace edba;
namespace fs = std::filesystem;

namespace {

// Small vision setup that trains in well under a second per run.
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.rounds = 6;
  c.n_clients = 8;
  c.clients_per_round = 4;
  c.dataset.train_size = 320;
  c.dataset.test_size = 80;
  c.dataset.classes = 4;
  c.model.hidden = {16};
  c.training.epochs = 1;
  c.attack.window_stop = 6;
  c.attack.injection.poison_epochs = 1;
  c.attack.trigger.epochs = 2;
  return c;
}

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config: json round-trip and hash") {
  ExperimentConfig c = small_config();
  c.defense.rule = AggregationRule::krum;
  c.attack.trigger.linf_bound = 0.4;
  const std::string text = config_to_json(c);
  ExperimentConfig back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  CHECK(config_hash(c) != config_hash(small_config()));
  CHECK(config_from_json("{}").rounds == ExperimentConfig{}.rounds);
}

TEST_CASE("config: unknown keys and bad values name their path") {
  CHECK(error_message([] { config_from_json(R"({"bogus": 1})"); }).find("bogus") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"attack": {"window": {"end": 3}}})"); })
            .find("attack.window.end") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"training": {"lr": -1}})"); })
            .find("training.lr") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"attack": {"method": "laser"}})"); })
            .find("attack.method") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"rounds": 10, "attack": {"window": {"stop": 11}}})"); })
            .find("attack.window.stop") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"n_clients": 4, "clients_per_round": 5})"); })
            .find("clients_per_round") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"scenario": {"malicious_ratio": 1.5}})"); })
            .find("scenario.malicious_ratio") != std::string::npos);
  CHECK(error_message([] { config_from_json(R"({"defense": {"freqfed_cutoff": 0}})"); })
            .find("defense.freqfed_cutoff") != std::string::npos);
  CHECK(error_message([] { config_from_json("{not json"); }) != "");
}

TEST_CASE("config: overrides") {
  ExperimentConfig c = small_config();
  auto k = apply_override(c, "defense.rule=krum");
  CHECK(k.defense.rule == AggregationRule::krum);
  CHECK(apply_override(c, "attack.injection.gamma=0.5").attack.injection.gamma == 0.5);
  CHECK_THROWS_AS(apply_override(c, "defense.nope=1"), Error);
  CHECK_THROWS_AS(apply_override(c, "rounds"), Error);
  // Individually invalid, jointly valid: order must not matter.
  std::vector<std::string> a{"rounds=3", "attack.window.stop=3"};
  std::vector<std::string> b{"attack.window.stop=3", "rounds=3"};
  CHECK(config_hash(apply_overrides(c, a)) == config_hash(apply_overrides(c, b)));
  CHECK_THROWS_AS(apply_override(c, "rounds=3"), Error);
}

TEST_CASE("selection: fixed frequency every tenth round inside the window") {
  ExperimentConfig c;
  c.rounds = 31;
  c.scenario.kind = ScenarioKind::fixed_frequency;
  c.attack.window_start = 0;
  c.attack.window_stop = 21;
  std::vector<int> attack_rounds;
  for (int r = 0; r <= 30; ++r) {
    Rng rng(derive_seed(1, {static_cast<std::uint64_t>(r)}));
    auto s = select_clients(c, r, rng);
    CHECK(s.selected.size() == static_cast<std::size_t>(c.clients_per_round));
    CHECK(std::set<int>(s.selected.begin(), s.selected.end()).size() == s.selected.size());
    if (!s.malicious.empty()) {
      attack_rounds.push_back(r);
      CHECK(s.malicious == std::vector<int>{0});
    } else {
      CHECK(std::find(s.selected.begin(), s.selected.end(), 0) == s.selected.end());
    }
  }
  CHECK(attack_rounds == std::vector<int>{0, 10, 20});

  c.scenario.substitute = false;
  Rng rng(1);
  auto extra = select_clients(c, 10, rng);
  CHECK(extra.selected.size() == static_cast<std::size_t>(c.clients_per_round) + 1);
}

TEST_CASE("selection: fixed pool ratios and window enforcement") {
  ExperimentConfig c;
  c.rounds = 40;
  c.attack.window_start = 5;
  c.attack.window_stop = 25;
  c.scenario.malicious_ratio = 0.0;
  for (int r = 0; r < 40; ++r) {
    Rng rng(r);
    CHECK(select_clients(c, r, rng).malicious.empty());
  }
  c.scenario.malicious_ratio = 1.0;
  for (int r = 5; r < 25; ++r) {
    Rng rng(r);
    auto s = select_clients(c, r, rng);
    CHECK(s.malicious == s.selected);
  }
  c.scenario.malicious_ratio = 0.15;
  CHECK(malicious_pool_size(c) == 3);
  for (int r = 0; r < 40; ++r) {
    Rng rng(100 + r);
    auto s = select_clients(c, r, rng);
    if (!in_attack_window(c, r)) CHECK(s.malicious.empty());
    for (int m : s.malicious) CHECK(m < 3);
    for (int id : s.selected)
      if (id < 3) CHECK(std::find(s.malicious.begin(), s.malicious.end(), id) != s.malicious.end());
  }
  c.attack.method = AttackMethod::none;
  CHECK(malicious_pool_size(c) == 0);
}

TEST_CASE("experiment: zero learning rate conserves the global model") {
  for (auto rule : {AggregationRule::fedavg, AggregationRule::ndc, AggregationRule::krum,
                    AggregationRule::multikrum, AggregationRule::median, AggregationRule::flame,
                    AggregationRule::freqfed}) {
    ExperimentConfig c = small_config();
    c.rounds = 3;
    c.attack.window_stop = 3;
    c.training.lr = 0.0;
    c.attack.injection.poison_lr = 0.0;
    c.defense.rule = rule;
    c.defense.flame_lambda = 0.0;
    Experiment e(c);
    const FlatParams g0 = e.workload().global();
    e.run_all();
    CHECK(e.workload().global() == g0);
    CHECK(e.records().front().ma == e.records().back().ma);
  }
  ExperimentConfig c = small_config();
  c.rounds = 2;
  c.attack.window_stop = 2;
  c.training.lr = 0.0;
  c.attack.injection.poison_lr = 0.0;
  c.defense.rule = AggregationRule::flame;
  c.defense.flame_lambda = 0.01;
  // Noise is scaled by the median update norm, which is zero here.
  Experiment e(c);
  const FlatParams g0 = e.workload().global();
  e.run_all();
  CHECK(e.workload().global() == g0);
}

TEST_CASE("experiment: one honest client hands its local model to the server") {
  ExperimentConfig c = small_config();
  c.n_clients = 1;
  c.clients_per_round = 1;
  c.rounds = 1;
  c.attack.method = AttackMethod::none;
  c.attack.window_stop = 0;
  auto w = make_workload(c);
  auto u = w->train_honest(0, derive_seed(c.seed, {kSeedTrain, 0, 0}));
  FlatParams expect = w->global();
  axpy(1.0, u.delta.data(), expect.data());
  Experiment e(c);
  e.run_all();
  CHECK(e.workload().global() == expect);
}

TEST_CASE("experiment: deterministic across reruns and thread counts") {
  ExperimentConfig c = small_config();
  auto a = run_experiment(c, {1, "", nullptr});
  auto b = run_experiment(c, {1, "", nullptr});
  auto t = run_experiment(c, {3, "", nullptr});
  CHECK(a.records == b.records);
  CHECK(a.records == t.records);
  CHECK(rounds_to_csv(a.records) == rounds_to_csv(t.records));
  CHECK(a.final_model.params == t.final_model.params);
}

TEST_CASE("experiment: rounds before the attack window match an attack-free run") {
  ExperimentConfig late = small_config();
  late.rounds = 8;
  late.attack.window_start = 4;
  late.attack.window_stop = 8;
  ExperimentConfig never = late;
  never.attack.window_start = 0;
  never.attack.window_stop = 0;
  auto a = run_experiment(late);
  auto b = run_experiment(never);
  for (int r = 0; r < 4; ++r) CHECK(a.records[r] == b.records[r]);
  bool attacked = false;
  for (const auto& rec : a.records) {
    if (rec.round >= late.attack.window_stop || rec.round < late.attack.window_start)
      CHECK(rec.malicious.empty());
    attacked |= !rec.malicious.empty();
  }
  CHECK(attacked);
  for (const auto& rec : b.records) CHECK(rec.malicious.empty());
}

TEST_CASE("experiment: empty attack window keeps BA near chance") {
  ExperimentConfig c;
  c.rounds = 30;
  c.attack.window_stop = 0;
  auto res = run_experiment(c);
  CHECK(res.records.back().ma >= 90.0);
  CHECK(res.records.back().ba <= 2.0 * 100.0 / static_cast<double>(c.dataset.classes));
}

TEST_CASE("experiment: update history is an EMA of |aggregated delta|") {
  ExperimentConfig c = small_config();
  c.rounds = 2;
  c.attack.method = AttackMethod::none;
  c.attack.window_stop = 0;
  Experiment e(c);
  std::vector<FlatParams> globals{e.workload().global()};
  e.run_round();
  globals.push_back(e.workload().global());
  e.run_round();
  globals.push_back(e.workload().global());
  const auto& h = e.update_history();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double d1 = std::abs(globals[1].data()[i] - globals[0].data()[i]);
    const double d2 = std::abs(globals[2].data()[i] - globals[1].data()[i]);
    CHECK(h[i] == doctest::Approx(0.9 * (0.1 * d1) + 0.1 * d2).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("experiment: non-finite aggregate aborts with a state dump") {
  ExperimentConfig c = small_config();
  c.scenario.malicious_ratio = 1.0;
  c.attack.method = AttackMethod::scaling;
  c.attack.scale_factor = 1e308;
  // Large local steps; the sum of the scaled deltas overflows.
  c.training.lr = 5.0;
  c.attack.injection.poison_lr = 5.0;
  const auto dir = fresh_dir("edba_abort_dump");
  Experiment e(c, {1, dir.string(), nullptr});
  try {
    e.run_round();
    FAIL("expected a numeric error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::numeric);
  }
  CHECK(fs::exists(dir / "abort_round0.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("experiment: text workload runs and scores positions") {
  ExperimentConfig c = small_config();
  c.dataset.modality = Modality::text;
  c.dataset.classes = 2;
  c.rounds = 20;
  c.attack.window_stop = 20;
  c.training.epochs = 2;
  auto res = run_experiment(c);
  CHECK(res.records.size() == 20);
  CHECK(res.records.back().ma > 50.0);
  const auto& trig = std::get<TextTrigger>(res.trigger);
  CHECK(trig.positions.size() == c.attack.text.trigger_length);
  CHECK(trig.version >= 1);
}

TEST_CASE("runner: run directory, sweep and report") {
  const auto root = fresh_dir("edba_runner_test");
  ExperimentConfig c = small_config();
  c.rounds = 3;
  c.attack.window_stop = 3;
  auto m = run_to_directory(c, (root / "one").string(), {});
  for (const char* f : {"config.json", "manifest.json", "rounds.csv", "timing.csv", "summary.json",
                        "final_model.ckpt", "trigger.bin"})
    CHECK(fs::exists(root / "one" / f));
  CHECK(m.config_hash == config_hash(c));
  CHECK(read_rounds_csv((root / "one" / "rounds.csv").string()).size() == 3);
  CHECK(config_hash(load_config((root / "one" / "config.json").string())) == config_hash(c));
  run_to_directory(c, (root / "two").string(), {});
  CHECK(slurp(root / "one" / "rounds.csv") == slurp(root / "two" / "rounds.csv"));

  std::vector<std::string> ratios{"0.05", "0.25"};
  auto rows = sweep_to_directory(c, "scenario.malicious_ratio", ratios, (root / "sweep").string(), {});
  CHECK(rows.size() == 2);
  CHECK(fs::exists(root / "sweep" / "scenario.malicious_ratio=0.05" / "rounds.csv"));
  CHECK(fs::exists(root / "sweep" / "scenario.malicious_ratio=0.25" / "rounds.csv"));
  CHECK(fs::exists(root / "sweep" / "sweep.csv"));
  CHECK(rows[0].seed != rows[1].seed);
  std::vector<std::string> none;
  CHECK_THROWS_AS(sweep_to_directory(c, "rounds", none, (root / "empty").string(), {}), Error);

  // A one-value sweep is the plain run with the override and derived seed.
  std::vector<std::string> single{"krum"};
  sweep_to_directory(c, "defense.rule", single, (root / "single").string(), {});
  ExperimentConfig k = apply_override(c, "defense.rule=krum");
  k.seed = sweep_seed(c.seed, "defense.rule", "krum");
  run_to_directory(k, (root / "krum").string(), {});
  CHECK(slurp(root / "single" / "defense.rule=krum" / "rounds.csv") == slurp(root / "krum" / "rounds.csv"));
  CHECK(sweep_seed(9, "seed", "42") == 42);

  std::vector<std::string> dirs{(root / "two").string(), (root / "one").string()};
  auto report = collect_report(dirs);
  REQUIRE(report.size() == 2);
  CHECK(report[0].run < report[1].run);
  CHECK(format_report(report).find("one") != std::string::npos);
  std::vector<std::string> one_dir{(root / "one").string()};
  CHECK(collect_report(one_dir).size() == 1);
  fs::remove(root / "two" / "rounds.csv");
  CHECK(error_message([&] { collect_report(dirs); }).find("rounds.csv") != std::string::npos);
  fs::remove_all(root);
}
