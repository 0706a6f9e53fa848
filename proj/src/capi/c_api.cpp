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

#include "edba/edba.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include "common/error.hpp"
#include "data/snapshot.hpp"
#include "engine/runner.hpp"
#include "nn/checkpoint.hpp"

struct edba_config {
  edba::ExperimentConfig cfg;
};

struct edba_model {
  edba::AnyModel model;
};

namespace {

thread_local std::string last_error;

edba_status to_status(edba::ErrorCode c) {
  switch (c) {
    case edba::ErrorCode::invalid_argument: return EDBA_ERR_INVALID_ARGUMENT;
    case edba::ErrorCode::shape_mismatch: return EDBA_ERR_SHAPE;
    case edba::ErrorCode::numeric: return EDBA_ERR_NUMERIC;
    case edba::ErrorCode::config: return EDBA_ERR_CONFIG;
    case edba::ErrorCode::io: return EDBA_ERR_IO;
    case edba::ErrorCode::internal: return EDBA_ERR_INTERNAL;
  }
  return EDBA_ERR_INTERNAL;
}

template <class F>
edba_status guarded(F&& f) {
  try {
    f();
    return EDBA_OK;
  } catch (const edba::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EDBA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EDBA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  edba::require(p != nullptr, edba::ErrorCode::invalid_argument,
                std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

edba::RunOptions options(int threads) {
  edba::RunOptions o;
  o.threads = threads < 1 ? 1 : threads;
  return o;
}

}  // namespace

extern "C" {

const char* edba_version(void) { return "0.1.0"; }

const char* edba_last_error(void) { return last_error.c_str(); }

void edba_string_free(char* s) { std::free(s); }

edba_status edba_config_default(edba_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new edba_config{};
  });
}

edba_status edba_config_parse(const char* json, edba_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new edba_config{edba::config_from_json(json)};
  });
}

edba_status edba_config_load(const char* path, edba_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new edba_config{edba::load_config(path)};
  });
}

edba_status edba_config_set(edba_config* cfg, const char* assignment) {
  return guarded([&] {
    need(cfg, "cfg");
    need(assignment, "assignment");
    cfg->cfg = edba::apply_override(cfg->cfg, assignment);
  });
}

edba_status edba_config_set_all(edba_config* cfg, const char* const* assignments, size_t n) {
  return guarded([&] {
    need(cfg, "cfg");
    if (n > 0) need(assignments, "assignments");
    std::vector<std::string> all;
    for (size_t i = 0; i < n; ++i) {
      need(assignments[i], "assignments[i]");
      all.emplace_back(assignments[i]);
    }
    cfg->cfg = edba::apply_overrides(cfg->cfg, all);
  });
}

edba_status edba_config_to_json(const edba_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(edba::config_to_json(cfg->cfg));
  });
}

edba_status edba_config_hash(const edba_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(edba::config_hash(cfg->cfg));
  });
}

void edba_config_free(edba_config* cfg) { delete cfg; }

edba_status edba_run(const edba_config* cfg, const char* out_dir, int threads) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    edba::run_to_directory(cfg->cfg, out_dir, options(threads));
  });
}

edba_status edba_sweep(const edba_config* cfg, const char* axis, const char* const* values,
                       size_t n_values, const char* out_dir, int threads) {
  return guarded([&] {
    need(cfg, "cfg");
    need(axis, "axis");
    need(out_dir, "out_dir");
    if (n_values > 0) need(values, "values");
    std::vector<std::string> v;
    for (size_t i = 0; i < n_values; ++i) {
      need(values[i], "values[i]");
      v.emplace_back(values[i]);
    }
    edba::sweep_to_directory(cfg->cfg, axis, v, out_dir, options(threads));
  });
}

edba_status edba_report(const char* const* run_dirs, size_t n_dirs, char** table) {
  return guarded([&] {
    need(table, "table");
    if (n_dirs > 0) need(run_dirs, "run_dirs");
    std::vector<std::string> dirs;
    for (size_t i = 0; i < n_dirs; ++i) {
      need(run_dirs[i], "run_dirs[i]");
      dirs.emplace_back(run_dirs[i]);
    }
    const auto rows = edba::collect_report(dirs);
    *table = dup_string(edba::format_report(rows));
  });
}

edba_status edba_export_dataset(const edba_config* cfg, const char* split, const char* csv_path) {
  return guarded([&] {
    need(cfg, "cfg");
    need(split, "split");
    need(csv_path, "csv_path");
    const std::string which(split);
    edba::require(which == "train" || which == "test", edba::ErrorCode::invalid_argument,
                  "split must be \"train\" or \"test\"");
    auto [train, test] = edba::build_datasets(cfg->cfg);
    edba::export_dataset_csv(csv_path, which == "train" ? train : test);
  });
}

edba_status edba_model_load(const char* checkpoint_path, edba_model** out) {
  return guarded([&] {
    need(checkpoint_path, "checkpoint_path");
    need(out, "out");
    *out = new edba_model{edba::restore_model(edba::load_checkpoint(checkpoint_path))};
  });
}

size_t edba_model_classes(const edba_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return m.classes(); }, model->model);
}

int edba_model_is_text(const edba_model* model) {
  return model && std::holds_alternative<edba::SeqModel>(model->model) ? 1 : 0;
}

edba_status edba_model_forward(const edba_model* model, const double* inputs, size_t rows,
                               size_t cols, double* logits, size_t logits_len) {
  return guarded([&] {
    need(model, "model");
    const auto* m = std::get_if<edba::MlpModel>(&model->model);
    edba::require(m != nullptr, edba::ErrorCode::invalid_argument,
                  "edba_model_forward needs a vision model");
    edba::require(cols == m->input_dim(), edba::ErrorCode::shape_mismatch,
                  "input width " + std::to_string(cols) + " does not match model input " +
                      std::to_string(m->input_dim()));
    edba::require(logits_len >= rows * m->classes(), edba::ErrorCode::shape_mismatch,
                  "logits buffer too small");
    if (rows == 0) return;
    need(inputs, "inputs");
    need(logits, "logits");
    edba::Tensor x({rows, cols}, std::vector<double>(inputs, inputs + rows * cols));
    const auto y = edba::forward(*m, x);
    std::memcpy(logits, y.data.data(), y.data.size() * sizeof(double));
  });
}

edba_status edba_model_forward_tokens(const edba_model* model, const uint32_t* tokens,
                                      size_t rows, size_t seq_len, double* logits,
                                      size_t logits_len) {
  return guarded([&] {
    need(model, "model");
    const auto* m = std::get_if<edba::SeqModel>(&model->model);
    edba::require(m != nullptr, edba::ErrorCode::invalid_argument,
                  "edba_model_forward_tokens needs a sequence model");
    edba::require(logits_len >= rows * m->classes(), edba::ErrorCode::shape_mismatch,
                  "logits buffer too small");
    edba::require(seq_len > 0, edba::ErrorCode::invalid_argument, "seq_len must be positive");
    if (rows == 0) return;
    need(tokens, "tokens");
    need(logits, "logits");
    edba::TokenBatch b{seq_len, std::vector<uint32_t>(tokens, tokens + rows * seq_len)};
    const auto y = edba::forward(*m, b);
    std::memcpy(logits, y.data.data(), y.data.size() * sizeof(double));
  });
}

void edba_model_free(edba_model* model) { delete model; }

edba_status edba_aggregate(const edba_config* cfg, const double* deltas, const int* client_ids,
                           size_t n_clients, size_t dim, uint64_t noise_seed, double* out,
                           int* accepted) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    if (n_clients > 0 && dim > 0) need(deltas, "deltas");
    std::vector<edba::ClientUpdate> ups(n_clients);
    for (size_t i = 0; i < n_clients; ++i) {
      ups[i].client_id = client_ids ? client_ids[i] : static_cast<int>(i);
      ups[i].delta.add_slot("delta", {dim});
      std::memcpy(ups[i].delta.data().data(), deltas + i * dim, dim * sizeof(double));
    }
    const auto res = edba::aggregate(cfg->cfg.defense, ups, noise_seed);
    std::memcpy(out, res.delta.data(), dim * sizeof(double));
    if (accepted)
      for (size_t i = 0; i < n_clients; ++i) accepted[i] = res.diagnostics.accepted[i] ? 1 : 0;
  });
}

}  // extern "C"
