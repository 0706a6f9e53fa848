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

#include "engine/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace edba {

using json = nlohmann::json;

std::string to_string(Modality m) { return m == Modality::vision ? "vision" : "text"; }
std::string to_string(ScenarioKind k) {
  return k == ScenarioKind::fixed_frequency ? "fixed_frequency" : "fixed_pool";
}
std::string to_string(PartitionKind k) { return k == PartitionKind::iid ? "iid" : "dirichlet"; }

std::string to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::none: return "none";
    case AttackMethod::badnets: return "badnets";
    case AttackMethod::edba: return "edba";
    case AttackMethod::scaling: return "scaling";
    case AttackMethod::neurotoxin: return "neurotoxin";
    case AttackMethod::pgd: return "pgd";
    case AttackMethod::edba_neurotoxin: return "edba_neurotoxin";
  }
  return "none";
}

AttackMethod parse_attack_method(std::string_view s) {
  for (auto m : {AttackMethod::none, AttackMethod::badnets, AttackMethod::edba,
                 AttackMethod::scaling, AttackMethod::neurotoxin, AttackMethod::pgd,
                 AttackMethod::edba_neurotoxin})
    if (s == to_string(m)) return m;
  fail(ErrorCode::config, "unknown attack method: " + std::string(s));
}

TriggerSource trigger_source(AttackMethod m) {
  switch (m) {
    case AttackMethod::none: return TriggerSource::none;
    case AttackMethod::edba:
    case AttackMethod::edba_neurotoxin: return TriggerSource::optimized;
    case AttackMethod::pgd: return TriggerSource::pgd;
    default: return TriggerSource::patch;
  }
}

UpdateTransform update_transform(AttackMethod m) {
  switch (m) {
    case AttackMethod::scaling: return UpdateTransform::scale;
    case AttackMethod::neurotoxin:
    case AttackMethod::edba_neurotoxin: return UpdateTransform::neurotoxin;
    default: return UpdateTransform::none;
  }
}

namespace {

Modality parse_modality(std::string_view s) {
  if (s == "vision") return Modality::vision;
  if (s == "text") return Modality::text;
  fail(ErrorCode::config, "unknown modality: " + std::string(s));
}

ScenarioKind parse_scenario(std::string_view s) {
  if (s == "fixed_frequency") return ScenarioKind::fixed_frequency;
  if (s == "fixed_pool") return ScenarioKind::fixed_pool;
  fail(ErrorCode::config, "unknown scenario: " + std::string(s));
}

PartitionKind parse_partition(std::string_view s) {
  if (s == "iid") return PartitionKind::iid;
  if (s == "dirichlet") return PartitionKind::dirichlet;
  fail(ErrorCode::config, "unknown partition kind: " + std::string(s));
}

std::string to_string(ScoreSpace s) {
  return s == ScoreSpace::probabilities ? "probabilities" : "logits";
}

ScoreSpace parse_score_space(std::string_view s) {
  if (s == "probabilities") return ScoreSpace::probabilities;
  if (s == "logits") return ScoreSpace::logits;
  fail(ErrorCode::config, "unknown score space: " + std::string(s));
}

// Reads the fields of one JSON object, remembering which keys were consumed
// so leftovers can be reported.
class Reader {
 public:
  Reader(json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::config, label() + ": expected an object");
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void boolean(const char* key, bool& out) {
    if (auto* v = find(key)) {
      if (!v->is_boolean()) wrong(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void integer(const char* key, int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) wrong(key, "an integer");
      const auto x = v->get<long long>();
      if (x < INT32_MIN || x > INT32_MAX) wrong(key, "a 32-bit integer");
      out = static_cast<int>(x);
    }
  }
  void count(const char* key, std::size_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) wrong(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void seed(const char* key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) wrong(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void real(const char* key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) wrong(key, "a number");
      out = v->get<double>();
    }
  }
  void optional_real(const char* key, std::optional<double>& out) {
    if (auto* v = find(key)) {
      if (v->is_null()) out.reset();
      else if (v->is_number()) out = v->get<double>();
      else wrong(key, "a number or null");
    }
  }
  template <class Parse, class T>
  void tag(const char* key, T& out, Parse parse) {
    if (auto* v = find(key)) {
      if (!v->is_string()) wrong(key, "a string");
      try {
        out = parse(v->get<std::string>());
      } catch (const Error& e) {
        fail(ErrorCode::config, at(key) + ": " + e.what());
      }
    }
  }
  void counts(const char* key, std::vector<std::size_t>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) wrong(key, "an array of non-negative integers");
      std::vector<std::size_t> tmp;
      for (const auto& e : *v) {
        if (!e.is_number_unsigned()) wrong(key, "an array of non-negative integers");
        tmp.push_back(e.get<std::size_t>());
      }
      out = std::move(tmp);
    }
  }

  Reader child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return Reader(it == j_.end() ? json::object() : *it, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(ErrorCode::config, at(it.key().c_str()) + ": unknown key");
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void wrong(const char* key, const char* expected) const {
    fail(ErrorCode::config, at(key) + ": expected " + expected);
  }
  std::string label() const { return path_.empty() ? "config" : path_; }

  json j_;
  std::string path_;
  std::set<std::string> seen_;
};

json to_json_value(const ExperimentConfig& c) {
  const auto& a = c.attack;
  json trig = {{"step_size", a.trigger.step_size},
               {"epochs", a.trigger.epochs},
               {"refresh_fraction", a.trigger.refresh_fraction},
               {"linf_bound", a.trigger.linf_bound ? json(*a.trigger.linf_bound) : json(nullptr)},
               {"clip_inputs", a.trigger.clip_inputs},
               {"backtracking", a.trigger.backtracking},
               {"init_scale", a.trigger_init_scale},
               {"batches", a.trigger_batches},
               {"refresh_per_batch", a.refresh_per_batch}};
  json attack = {
      {"method", to_string(a.method)},
      {"window", {{"start", a.window_start}, {"stop", a.window_stop}}},
      {"target_label", a.target_label},
      {"injection",
       {{"poison_lr", a.injection.poison_lr},
        {"poison_epochs", a.injection.poison_epochs},
        {"gamma", a.injection.gamma},
        {"poison_ratio", a.injection.poison.ratio},
        {"interleave", a.injection.interleave}}},
      {"penalize_baselines", a.penalize_baselines},
      {"trigger", trig},
      {"text",
       {{"candidates", a.text.candidates},
        {"trigger_length", a.text.trigger_length},
        {"score_space", to_string(a.text.score_space)}}},
      {"patch",
       {{"size", a.patch.size}, {"corner", to_string(a.patch.corner)}, {"value", a.patch.value}}},
      {"scale_factor", a.scale_factor},
      {"neurotoxin_fraction", a.neurotoxin_fraction},
      {"history_decay", a.history_decay},
      {"pgd",
       {{"steps", a.pgd.steps}, {"step_size", a.pgd.step_size}, {"linf_bound", a.pgd.linf_bound}}}};
  const auto& d = c.dataset;
  return {
      {"seed", c.seed},
      {"rounds", c.rounds},
      {"n_clients", c.n_clients},
      {"clients_per_round", c.clients_per_round},
      {"dataset",
       {{"modality", to_string(d.modality)},
        {"train_size", d.train_size},
        {"test_size", d.test_size},
        {"classes", d.classes},
        {"dim", d.dim},
        {"cluster_spread", d.cluster_spread},
        {"seq_len", d.seq_len},
        {"vocab", d.vocab}}},
      {"model",
       {{"hidden", c.model.hidden},
        {"activation", to_string(c.model.activation)},
        {"embed_dim", c.model.embed_dim}}},
      {"partition", {{"kind", to_string(c.partition.kind)}, {"alpha", c.partition.alpha}}},
      {"scenario",
       {{"kind", to_string(c.scenario.kind)},
        {"frequency", c.scenario.frequency},
        {"substitute", c.scenario.substitute},
        {"malicious_ratio", c.scenario.malicious_ratio}}},
      {"training",
       {{"lr", c.training.lr},
        {"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"momentum", c.training.momentum},
        {"weight_decay", c.training.weight_decay}}},
      {"attack", attack},
      {"defense",
       {{"rule", to_string(c.defense.rule)},
        {"clip_norm", c.defense.clip_norm},
        {"krum_f", c.defense.krum_f},
        {"multikrum_m", c.defense.multikrum_m},
        {"flame_lambda", c.defense.flame_lambda},
        {"freqfed_cutoff", c.defense.freqfed_cutoff}}},
      {"metrics",
       {{"lifespan_threshold", c.metrics.lifespan_threshold},
        {"exclude_target", c.metrics.exclude_target}}}};
}

ExperimentConfig from_json_value(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  r.seed("seed", c.seed);
  r.integer("rounds", c.rounds);
  r.integer("n_clients", c.n_clients);
  r.integer("clients_per_round", c.clients_per_round);
  {
    auto d = r.child("dataset");
    d.tag("modality", c.dataset.modality, parse_modality);
    d.count("train_size", c.dataset.train_size);
    d.count("test_size", c.dataset.test_size);
    d.count("classes", c.dataset.classes);
    d.count("dim", c.dataset.dim);
    d.real("cluster_spread", c.dataset.cluster_spread);
    d.count("seq_len", c.dataset.seq_len);
    d.count("vocab", c.dataset.vocab);
    d.finish();
  }
  {
    auto m = r.child("model");
    m.counts("hidden", c.model.hidden);
    m.tag("activation", c.model.activation, parse_activation);
    m.count("embed_dim", c.model.embed_dim);
    m.finish();
  }
  {
    auto p = r.child("partition");
    p.tag("kind", c.partition.kind, parse_partition);
    p.real("alpha", c.partition.alpha);
    p.finish();
  }
  {
    auto s = r.child("scenario");
    s.tag("kind", c.scenario.kind, parse_scenario);
    s.integer("frequency", c.scenario.frequency);
    s.boolean("substitute", c.scenario.substitute);
    s.real("malicious_ratio", c.scenario.malicious_ratio);
    s.finish();
  }
  {
    auto t = r.child("training");
    t.real("lr", c.training.lr);
    t.integer("epochs", c.training.epochs);
    t.count("batch_size", c.training.batch_size);
    t.real("momentum", c.training.momentum);
    t.real("weight_decay", c.training.weight_decay);
    t.finish();
  }
  {
    auto& a = c.attack;
    auto ar = r.child("attack");
    ar.tag("method", a.method, parse_attack_method);
    {
      auto w = ar.child("window");
      w.integer("start", a.window_start);
      w.integer("stop", a.window_stop);
      w.finish();
    }
    ar.integer("target_label", a.target_label);
    {
      auto inj = ar.child("injection");
      inj.real("poison_lr", a.injection.poison_lr);
      inj.integer("poison_epochs", a.injection.poison_epochs);
      inj.real("gamma", a.injection.gamma);
      inj.real("poison_ratio", a.injection.poison.ratio);
      inj.boolean("interleave", a.injection.interleave);
      inj.finish();
    }
    ar.boolean("penalize_baselines", a.penalize_baselines);
    {
      auto t = ar.child("trigger");
      t.real("step_size", a.trigger.step_size);
      t.integer("epochs", a.trigger.epochs);
      t.real("refresh_fraction", a.trigger.refresh_fraction);
      t.optional_real("linf_bound", a.trigger.linf_bound);
      t.boolean("clip_inputs", a.trigger.clip_inputs);
      t.boolean("backtracking", a.trigger.backtracking);
      t.real("init_scale", a.trigger_init_scale);
      t.count("batches", a.trigger_batches);
      t.boolean("refresh_per_batch", a.refresh_per_batch);
      t.finish();
    }
    {
      auto t = ar.child("text");
      t.count("candidates", a.text.candidates);
      t.count("trigger_length", a.text.trigger_length);
      t.tag("score_space", a.text.score_space, parse_score_space);
      t.finish();
    }
    {
      auto p = ar.child("patch");
      p.count("size", a.patch.size);
      p.tag("corner", a.patch.corner, parse_corner);
      p.real("value", a.patch.value);
      p.finish();
    }
    ar.real("scale_factor", a.scale_factor);
    ar.real("neurotoxin_fraction", a.neurotoxin_fraction);
    ar.real("history_decay", a.history_decay);
    {
      auto p = ar.child("pgd");
      p.integer("steps", a.pgd.steps);
      p.real("step_size", a.pgd.step_size);
      p.real("linf_bound", a.pgd.linf_bound);
      p.finish();
    }
    ar.finish();
    a.injection.poison.target_label = a.target_label;
  }
  {
    auto d = r.child("defense");
    d.tag("rule", c.defense.rule, parse_rule);
    d.real("clip_norm", c.defense.clip_norm);
    d.integer("krum_f", c.defense.krum_f);
    d.integer("multikrum_m", c.defense.multikrum_m);
    d.real("flame_lambda", c.defense.flame_lambda);
    d.real("freqfed_cutoff", c.defense.freqfed_cutoff);
    d.finish();
  }
  {
    auto m = r.child("metrics");
    m.real("lifespan_threshold", c.metrics.lifespan_threshold);
    m.boolean("exclude_target", c.metrics.exclude_target);
    m.finish();
  }
  r.finish();
  validate(c);
  return c;
}

void check(bool ok, const char* path, const std::string& msg) {
  if (!ok) fail(ErrorCode::config, std::string(path) + ": " + msg);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  check(c.rounds >= 1, "rounds", "must be at least 1");
  check(c.n_clients >= 1, "n_clients", "must be at least 1");
  check(c.clients_per_round >= 1 && c.clients_per_round <= c.n_clients, "clients_per_round",
        "must lie in [1, n_clients]");

  const auto& d = c.dataset;
  check(d.classes >= 2, "dataset.classes", "must be at least 2");
  check(d.train_size >= 1, "dataset.train_size", "must be at least 1");
  check(d.test_size >= 1, "dataset.test_size", "must be at least 1");
  if (d.modality == Modality::vision) {
    check(d.dim >= 4, "dataset.dim", "must be at least 4");
    check(d.cluster_spread > 0.0 && std::isfinite(d.cluster_spread), "dataset.cluster_spread",
          "must be positive");
  } else {
    check(d.seq_len >= 1, "dataset.seq_len", "must be at least 1");
    // placeholder, rare tokens, indicative tokens and at least four fillers
    const std::size_t need = 1 + 4 + 4 * d.classes + 4;
    check(d.vocab >= need, "dataset.vocab",
          "must be at least " + std::to_string(need) + " for " + std::to_string(d.classes) +
              " classes");
  }
  check(c.model.embed_dim >= 1, "model.embed_dim", "must be at least 1");
  for (auto w : c.model.hidden) check(w >= 1, "model.hidden", "widths must be positive");

  check(c.partition.alpha > 0.0 && std::isfinite(c.partition.alpha), "partition.alpha",
        "must be positive");
  check(c.scenario.frequency >= 1, "scenario.frequency", "must be at least 1");
  check(c.scenario.malicious_ratio >= 0.0 && c.scenario.malicious_ratio <= 1.0,
        "scenario.malicious_ratio", "must lie in [0,1]");

  const auto& t = c.training;
  check(t.lr >= 0.0 && std::isfinite(t.lr), "training.lr", "must be non-negative");
  check(t.epochs >= 1, "training.epochs", "must be at least 1");
  check(t.batch_size >= 1, "training.batch_size", "must be at least 1");
  check(t.momentum >= 0.0 && t.momentum < 1.0, "training.momentum", "must lie in [0,1)");
  check(t.weight_decay >= 0.0, "training.weight_decay", "must be non-negative");

  const auto& a = c.attack;
  check(a.window_start >= 0, "attack.window.start", "must be non-negative");
  check(a.window_stop >= a.window_start, "attack.window.stop", "must not precede window.start");
  check(a.window_stop <= c.rounds, "attack.window.stop", "must not exceed rounds");
  check(a.target_label >= 0 && static_cast<std::size_t>(a.target_label) < d.classes,
        "attack.target_label", "must be a valid class");
  check(a.injection.poison_lr >= 0.0, "attack.injection.poison_lr", "must be non-negative");
  check(a.injection.poison_epochs >= 1 && a.injection.poison_epochs <= t.epochs,
        "attack.injection.poison_epochs", "must lie in [1, training.epochs]");
  check(a.injection.gamma >= 0.0, "attack.injection.gamma", "must be non-negative");
  check(a.injection.poison.ratio >= 0.0 && a.injection.poison.ratio < 1.0,
        "attack.injection.poison_ratio", "must lie in [0,1)");
  check(a.trigger.step_size > 0.0, "attack.trigger.step_size", "must be positive");
  check(a.trigger.epochs >= 1, "attack.trigger.epochs", "must be at least 1");
  check(a.trigger.refresh_fraction >= 0.0, "attack.trigger.refresh_fraction",
        "must be non-negative");
  check(!a.trigger.linf_bound || *a.trigger.linf_bound > 0.0, "attack.trigger.linf_bound",
        "must be positive or null");
  check(a.trigger_init_scale >= 0.0, "attack.trigger.init_scale", "must be non-negative");
  check(a.trigger_batches >= 1, "attack.trigger.batches", "must be at least 1");
  check(a.scale_factor >= 0.0 && std::isfinite(a.scale_factor), "attack.scale_factor",
        "must be non-negative");
  check(a.neurotoxin_fraction >= 0.0 && a.neurotoxin_fraction <= 1.0,
        "attack.neurotoxin_fraction", "must lie in [0,1]");
  check(a.history_decay >= 0.0 && a.history_decay < 1.0, "attack.history_decay",
        "must lie in [0,1)");
  check(a.pgd.steps >= 0, "attack.pgd.steps", "must be non-negative");
  check(a.pgd.step_size >= 0.0, "attack.pgd.step_size", "must be non-negative");
  check(a.pgd.linf_bound >= 0.0, "attack.pgd.linf_bound", "must be non-negative");
  if (d.modality == Modality::vision) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(double(d.dim))));
    if (trigger_source(a.method) == TriggerSource::patch) {
      check(side * side == d.dim, "dataset.dim", "patch triggers need a square image");
      check(a.patch.size >= 1 && a.patch.size <= side, "attack.patch.size",
            "must lie in [1, image side]");
    }
  } else {
    check(a.method != AttackMethod::pgd, "attack.method", "pgd needs the vision modality");
    check(a.text.candidates >= 1 && a.text.candidates <= d.seq_len, "attack.text.candidates",
          "must lie in [1, seq_len]");
    check(a.text.trigger_length >= 1 && a.text.trigger_length <= a.text.candidates,
          "attack.text.trigger_length", "must lie in [1, candidates]");
  }

  const auto& g = c.defense;
  check(g.clip_norm > 0.0, "defense.clip_norm", "must be positive");
  check(g.krum_f >= 0, "defense.krum_f", "must be non-negative");
  check(g.multikrum_m >= 1, "defense.multikrum_m", "must be at least 1");
  check(g.flame_lambda >= 0.0, "defense.flame_lambda", "must be non-negative");
  check(g.freqfed_cutoff > 0.0 && g.freqfed_cutoff <= 1.0, "defense.freqfed_cutoff",
        "must lie in (0,1]");
  check(c.metrics.lifespan_threshold >= 0.0 && c.metrics.lifespan_threshold <= 100.0,
        "metrics.lifespan_threshold", "must lie in [0,100]");
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
  return to_json_value(cfg).dump(indent);
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  return from_json_value(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::io, "cannot read config " + path + ": " + e.what());
  }
  return config_from_json(text);
}

ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 std::span<const std::string> assignments) {
  json root = to_json_value(cfg);
  for (const auto& assignment : assignments) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::config,
            "override must look like path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json* node = &root;
    std::size_t begin = 0;
    while (true) {
      const auto dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
      require(node->is_object() && node->contains(key), ErrorCode::config,
              path + ": unknown key");
      node = &(*node)[key];
      if (dot == std::string::npos) break;
      begin = dot + 1;
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    *node = std::move(value);
  }
  return from_json_value(root);
}

ExperimentConfig apply_override(const ExperimentConfig& cfg, std::string_view assignment) {
  const std::string one(assignment);
  return apply_overrides(cfg, std::span(&one, 1));
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg, -1);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace edba
