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

#ifndef EDBA_EDBA_H
#define EDBA_EDBA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EDBA_API __declspec(dllexport)
#else
#define EDBA_API __attribute__((visibility("default")))
#endif

typedef enum edba_status {
  EDBA_OK = 0,
  EDBA_ERR_INVALID_ARGUMENT = 1,
  EDBA_ERR_SHAPE = 2,
  EDBA_ERR_NUMERIC = 3,
  EDBA_ERR_CONFIG = 4,
  EDBA_ERR_IO = 5,
  EDBA_ERR_INTERNAL = 6
} edba_status;

typedef struct edba_config edba_config;
typedef struct edba_model edba_model;

/* Library version, e.g. "0.1.0". Static storage. */
EDBA_API const char* edba_version(void);

/* Message of the last failing call on this thread, "" if none. Valid until
 * the next failing call on the same thread. */
EDBA_API const char* edba_last_error(void);

/* Frees strings returned through char** out-parameters. */
EDBA_API void edba_string_free(char* s);

/* Configs. */
EDBA_API edba_status edba_config_default(edba_config** out);
EDBA_API edba_status edba_config_parse(const char* json, edba_config** out);
EDBA_API edba_status edba_config_load(const char* path, edba_config** out);
/* "dotted.path=value"; value is JSON when it parses as JSON, else a string. */
EDBA_API edba_status edba_config_set(edba_config* cfg, const char* assignment);
/* Applies all assignments, then validates once. */
EDBA_API edba_status edba_config_set_all(edba_config* cfg, const char* const* assignments,
                                         size_t n);
EDBA_API edba_status edba_config_to_json(const edba_config* cfg, char** out);
EDBA_API edba_status edba_config_hash(const edba_config* cfg, char** out);
EDBA_API void edba_config_free(edba_config* cfg);

/* Experiments. Runs write config.json, manifest.json, rounds.csv,
 * timing.csv, summary.json, final_model.ckpt and trigger.bin. */
EDBA_API edba_status edba_run(const edba_config* cfg, const char* out_dir, int threads);
EDBA_API edba_status edba_sweep(const edba_config* cfg, const char* axis,
                                const char* const* values, size_t n_values,
                                const char* out_dir, int threads);
/* Text table with one row per run directory, sorted by name. */
EDBA_API edba_status edba_report(const char* const* run_dirs, size_t n_dirs, char** table);
/* split is "train" or "test". */
EDBA_API edba_status edba_export_dataset(const edba_config* cfg, const char* split,
                                         const char* csv_path);

/* Models restored from checkpoints. */
EDBA_API edba_status edba_model_load(const char* checkpoint_path, edba_model** out);
EDBA_API size_t edba_model_classes(const edba_model* model);
/* 1 for sequence models, 0 for dense vision models. */
EDBA_API int edba_model_is_text(const edba_model* model);
/* Vision models: inputs is rows x cols row-major, logits receives
 * rows x classes. */
EDBA_API edba_status edba_model_forward(const edba_model* model, const double* inputs,
                                        size_t rows, size_t cols, double* logits,
                                        size_t logits_len);
/* Text models: tokens is rows x seq_len row-major. */
EDBA_API edba_status edba_model_forward_tokens(const edba_model* model, const uint32_t* tokens,
                                               size_t rows, size_t seq_len, double* logits,
                                               size_t logits_len);
EDBA_API void edba_model_free(edba_model* model);

/* Applies the defense configured in cfg to n_clients deltas of length dim
 * (row-major). out receives the aggregated delta; accepted (optional)
 * receives one 0/1 flag per client. */
EDBA_API edba_status edba_aggregate(const edba_config* cfg, const double* deltas,
                                    const int* client_ids, size_t n_clients, size_t dim,
                                    uint64_t noise_seed, double* out, int* accepted);

#ifdef __cplusplus
}
#endif

#endif /* EDBA_EDBA_H */
