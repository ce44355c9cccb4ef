// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

// C interface to spandistill. Every handle is opaque and owned by the caller
// once returned; release it with the matching *_destroy function. Strings
// returned through char** are heap-allocated and freed with sd_string_free.
// Functions returning sd_status leave their outputs untouched on failure and
// record a message retrievable with sd_last_error() on the calling thread.

#ifndef SPANDISTILL_H_
#define SPANDISTILL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SPANDISTILL_BUILDING_LIBRARY)
#define SD_API __attribute__((visibility("default")))
#else
#define SD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sd_status {
  SD_OK = 0,
  SD_ERR_USAGE = 1,     /* bad argument, option or missing credential */
  SD_ERR_DATA = 2,      /* unreadable or malformed input, failed write */
  SD_ERR_UPSTREAM = 3,  /* the LLM service failed */
  SD_ERR_INTERNAL = 4
} sd_status;

typedef struct sd_options sd_options;
typedef struct sd_llm_client sd_llm_client;
typedef struct sd_distill_set sd_distill_set;
typedef struct sd_example_set sd_example_set;
typedef struct sd_schema sd_schema;
typedef struct sd_task_set sd_task_set;
typedef struct sd_tagger sd_tagger;

SD_API const char* sd_version(void);
SD_API const char* sd_prompt_version(void);
SD_API const char* sd_last_error(void);
SD_API void sd_string_free(char* s);

/* Options: a flat key/value bag shared by every entry point. Values are
   parsed as JSON when possible ("64", "0.5", "true") and kept as strings
   otherwise. Each consumer reads the keys it knows and ignores the rest. */
SD_API sd_options* sd_options_create(void);
SD_API void sd_options_destroy(sd_options* options);
SD_API sd_status sd_options_set(sd_options* options, const char* key, const char* value);
SD_API int sd_options_has(const sd_options* options, const char* key);
/* Typed reads; a missing key yields the fallback. */
SD_API sd_status sd_options_get_u64(const sd_options* options, const char* key, uint64_t fallback,
                                    uint64_t* out);
SD_API sd_status sd_options_get_bool(const sd_options* options, const char* key, int fallback, int* out);
/* Merges a JSON object file. Keys already present win unless overwrite != 0. */
SD_API sd_status sd_options_merge_file(sd_options* options, const char* path, int overwrite);
/* Adds the built-in default of every key `command` reads ("synth", "train",
   "fewshot") that is not set yet, so the bag becomes a full snapshot. The
   few-shot defaults come from the schema's protocol. */
SD_API sd_status sd_options_fill_defaults(sd_options* options, const char* command, const sd_schema* schema);
SD_API sd_status sd_options_to_json(const sd_options* options, char** out_json);

/* LLM clients. The chat client reads base_url, endpoint, model, temperature,
   max_tokens, timeout_seconds and api_key_env (default OPENAI_API_KEY); a
   missing key is SD_ERR_USAGE. */
SD_API sd_status sd_llm_client_create_mock(sd_llm_client** out);
SD_API sd_status sd_llm_client_create_chat(const sd_options* options, sd_llm_client** out);
SD_API size_t sd_llm_client_requests(const sd_llm_client* client);
SD_API void sd_llm_client_destroy(sd_llm_client* client);

/* Distillation datasets. sd_synthesize reads n, parallelism, max_attempts,
   initial_backoff_ms, max_backoff_ms and corpus_name. */
SD_API sd_status sd_synthesize(const char* corpus_path, sd_llm_client* client,
                               const sd_options* options, sd_distill_set** out,
                               char** out_diagnostics_json);
SD_API sd_status sd_distill_set_load(const char* path, sd_distill_set** out);
SD_API sd_status sd_distill_set_save(const sd_distill_set* set, const char* path);
SD_API size_t sd_distill_set_size(const sd_distill_set* set);
SD_API size_t sd_distill_set_failed(const sd_distill_set* set);
SD_API sd_status sd_distill_set_subsample(const sd_distill_set* set, size_t k, uint64_t seed,
                                          sd_distill_set** out);
/* as_json != 0 renders JSON, otherwise an aligned text table. */
SD_API sd_status sd_distill_set_label_stats(const sd_distill_set* set, size_t top_k, int as_json,
                                            char** out);
SD_API void sd_distill_set_destroy(sd_distill_set* set);

/* Task schemas and datasets. */
SD_API sd_status sd_schema_default(const char* task, sd_schema** out);
SD_API sd_status sd_schema_load(const char* path, sd_schema** out);
SD_API sd_status sd_schema_to_json(const sd_schema* schema, char** out_json);
SD_API const char* sd_schema_task(const sd_schema* schema);
SD_API void sd_schema_destroy(sd_schema* schema);

SD_API sd_status sd_task_set_load(const char* path, const sd_schema* schema, sd_task_set** out);
SD_API size_t sd_task_set_size(const sd_task_set* set);
/* Reads rule (per-label, fraction, absolute), k, fraction, count and seed,
   falling back to the schema's protocol. */
SD_API sd_status sd_task_set_fewshot(const sd_task_set* set, const sd_schema* schema,
                                     const sd_options* options, sd_task_set** out,
                                     char** out_info_json);
SD_API sd_status sd_task_set_save(const sd_task_set* set, const char* path);
SD_API void sd_task_set_destroy(sd_task_set* set);

/* Tagged examples. */
SD_API sd_status sd_example_set_from_distill(const sd_distill_set* set, size_t negatives_per_record,
                                             uint64_t seed, sd_example_set** out,
                                             char** out_stats_json);
SD_API sd_status sd_example_set_from_task(const sd_schema* schema, const sd_task_set* set,
                                          sd_example_set** out, char** out_diagnostics_json);
SD_API sd_status sd_example_set_load(const char* path, sd_example_set** out);
SD_API size_t sd_example_set_size(const sd_example_set* set);
/* format: "bio" (JSONL tags), "seq2seq" ({input,target}) or "causal"
   ({text,target_begin,target_end}). */
SD_API sd_status sd_example_set_save(const sd_example_set* set, const char* format, const char* path);
SD_API void sd_example_set_destroy(sd_example_set* set);

/* Taggers. The toy tagger reads hash_bits and window. The oracle replays the
   gold answers of a task set. */
SD_API sd_status sd_tagger_create_toy(const sd_options* options, sd_tagger** out);
SD_API sd_status sd_tagger_create_oracle(const sd_schema* schema, const sd_task_set* set,
                                         sd_tagger** out);
SD_API sd_status sd_tagger_load(const char* path, sd_tagger** out);
SD_API sd_status sd_tagger_save(const sd_tagger* tagger, const char* path);
SD_API sd_status sd_tagger_clone(const sd_tagger* tagger, sd_tagger** out);
SD_API const char* sd_tagger_kind(const sd_tagger* tagger);
/* Spans for one label query as [{"start","end","text","score"}]. */
SD_API sd_status sd_tagger_predict(const sd_tagger* tagger, const char* label, const char* sentence,
                                   char** out_json);
SD_API void sd_tagger_destroy(sd_tagger* tagger);

/* Training config from options (learning_rate, batch_size, epochs, seed,
   weight_decay, beta1, beta2, epsilon, optimizer, schedule) over defaults. */
SD_API sd_status sd_train_config(const sd_options* options, char** out_json);
SD_API sd_status sd_train(sd_tagger* tagger, const sd_example_set* examples, const sd_options* options,
                          char** out_summary_json, char** out_log_jsonl);

/* mode: full, re-entity, re-relation, ee-trigger-unlabeled, ee-argument-unlabeled. */
SD_API sd_status sd_evaluate(const sd_tagger* tagger, const sd_schema* schema, const sd_task_set* set,
                             const char* mode, size_t parallelism, const char* run_name,
                             char** out_report_json, char** out_table, char** out_csv);

/* Files and run manifests. */
SD_API sd_status sd_file_sha256(const char* path, char** out_hex);
SD_API sd_status sd_write_file(const char* path, const char* data, size_t size);
/* Writes {command, config, datasets:[{path, sha256}], seed, version,
   prompt_version, started_at} atomically. */
SD_API sd_status sd_manifest_write(const char* path, const char* command, const sd_options* config,
                                   const char* const* dataset_paths, size_t dataset_count,
                                   uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif  // SPANDISTILL_H_
