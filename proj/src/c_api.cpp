// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/spandistill.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>

#include "spandistill/distill_synth.hpp"
#include "spandistill/error.hpp"
#include "spandistill/hashing.hpp"
#include "spandistill/io.hpp"
#include "spandistill/synthetic.hpp"
#include "spandistill/text.hpp"
#include "spandistill/toy_tagger.hpp"

using namespace spandistill;

struct sd_options {
  Json values = Json::object();
};

struct sd_llm_client {
  std::unique_ptr<LlmClient> impl;
  std::atomic<std::size_t> requests{0};
};

struct sd_distill_set {
  std::vector<DistillRecord> records;
};

struct sd_example_set {
  std::vector<TaggedExample> examples;
};

struct sd_schema {
  TaskSchema schema;
};

struct sd_task_set {
  std::vector<TaskItem> items;
  TaskId task = TaskId::NER;
};

struct sd_tagger {
  std::unique_ptr<Tagger> impl;
  std::string kind;
};

namespace {

thread_local std::string g_last_error;

sd_status fail(sd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
sd_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SD_OK;
  } catch (const UpstreamError& e) {
    return fail(SD_ERR_UPSTREAM, e.what());
  } catch (const DataError& e) {
    return fail(SD_ERR_DATA, e.what());
  } catch (const Json::exception& e) {
    return fail(SD_ERR_DATA, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SD_ERR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SD_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(std::string_view s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_out(char** out, std::string_view s) {
  if (out != nullptr) *out = dup_string(s);
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " is null");
}

// Forwards to the wrapped client and counts requests.
class CountingClient final : public LlmClient {
 public:
  CountingClient(LlmClient& inner, std::atomic<std::size_t>& count) : inner_(inner), count_(count) {}
  std::string complete(const std::string& prompt) override {
    ++count_;
    return inner_.complete(prompt);
  }
  std::string name() const override { return inner_.name(); }

 private:
  LlmClient& inner_;
  std::atomic<std::size_t>& count_;
};

const Json* find(const sd_options* o, const char* key) {
  if (o == nullptr) return nullptr;
  const auto it = o->values.find(key);
  return it == o->values.end() ? nullptr : &*it;
}

template <typename T>
T get_or(const sd_options* o, const char* key, T fallback) {
  const Json* v = find(o, key);
  if (v == nullptr) return fallback;
  try {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!v->is_number_integer() || v->get<long long>() < 0) throw std::invalid_argument("");
    }
    return v->get<T>();
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("option '") + key + "' has an invalid value: " + v->dump());
  }
}

TrainConfig train_config(const sd_options* o) {
  static const char* const kKeys[] = {"learning_rate", "batch_size", "epochs", "seed",
                                      "weight_decay",  "beta1",      "beta2",  "epsilon",
                                      "optimizer",     "schedule"};
  Json subset = Json::object();
  for (const char* key : kKeys) {
    if (const Json* v = find(o, key)) subset[key] = *v;
  }
  TrainConfig c;
  try {
    c = train_config_from_json(subset);
  } catch (const DataError& e) {
    throw std::invalid_argument(e.what());
  }
  c.validate();
  return c;
}

}  // namespace

extern "C" {

const char* sd_version(void) { return SPANDISTILL_VERSION; }

const char* sd_prompt_version(void) { return kPromptVersion.data(); }

const char* sd_last_error(void) { return g_last_error.c_str(); }

void sd_string_free(char* s) { std::free(s); }

// ---- options ----

sd_options* sd_options_create(void) { return new (std::nothrow) sd_options(); }

void sd_options_destroy(sd_options* options) { delete options; }

sd_status sd_options_set(sd_options* options, const char* key, const char* value) {
  return guarded([&] {
    need(options, "options");
    need(key, "key");
    need(value, "value");
    if (*key == '\0') throw std::invalid_argument("empty option key");
    auto parsed = Json::parse(value, nullptr, false);
    options->values[key] = parsed.is_discarded() ? Json(value) : std::move(parsed);
  });
}

int sd_options_has(const sd_options* options, const char* key) {
  return key != nullptr && find(options, key) != nullptr ? 1 : 0;
}

sd_status sd_options_get_u64(const sd_options* options, const char* key, uint64_t fallback, uint64_t* out) {
  return guarded([&] {
    need(key, "key");
    need(out, "out");
    *out = get_or<std::uint64_t>(options, key, fallback);
  });
}

sd_status sd_options_get_bool(const sd_options* options, const char* key, int fallback, int* out) {
  return guarded([&] {
    need(key, "key");
    need(out, "out");
    *out = get_or<bool>(options, key, fallback != 0) ? 1 : 0;
  });
}

sd_status sd_options_merge_file(sd_options* options, const char* path, int overwrite) {
  return guarded([&] {
    need(options, "options");
    need(path, "path");
    Json j;
    try {
      j = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
      throw DataError(std::string(path) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(std::string(path) + ": config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (overwrite != 0 || !options->values.contains(key)) options->values[key] = v;
    }
  });
}

sd_status sd_options_fill_defaults(sd_options* options, const char* command, const sd_schema* schema) {
  return guarded([&] {
    need(options, "options");
    need(command, "command");
    Json defaults;
    const std::string_view cmd = command;
    if (cmd == "synth") {
      const SynthOptions so;
      defaults = {{"n", so.n},
                  {"parallelism", so.parallelism},
                  {"max_attempts", so.retry.max_attempts},
                  {"initial_backoff_ms", so.retry.initial_backoff.count()},
                  {"max_backoff_ms", so.retry.max_backoff.count()},
                  {"corpus_name", so.corpus_name},
                  {"mock", false}};
      const bool mock = get_or<bool>(options, "mock", false);
      if (!mock) {
        const ChatClientConfig cc;
        defaults.update(Json{{"base_url", cc.base_url},
                             {"endpoint", cc.endpoint},
                             {"model", cc.model},
                             {"temperature", cc.temperature},
                             {"max_tokens", cc.max_tokens},
                             {"timeout_seconds", cc.timeout_seconds},
                             {"api_key_env", "OPENAI_API_KEY"}});
      }
    } else if (cmd == "train") {
      const ToyTaggerOptions toy;
      defaults = train_config_to_json(TrainConfig{});
      defaults.update(Json{{"hash_bits", toy.hash_bits}, {"window", toy.window}, {"negatives", 1}});
    } else if (cmd == "fewshot") {
      need(schema, "schema");
      const auto& f = schema->schema.fewshot;
      const char* rule = f.rule == FewShotRule::PerLabelK ? "per-label"
                         : f.rule == FewShotRule::Fraction ? "fraction"
                                                           : "absolute";
      defaults = {{"rule", rule}, {"k", f.k}, {"fraction", f.fraction}, {"count", f.count}, {"seed", f.seed}};
    } else {
      throw std::invalid_argument("no defaults for command '" + std::string(cmd) + "'");
    }
    for (const auto& [key, v] : defaults.items()) {
      if (!options->values.contains(key)) options->values[key] = v;
    }
  });
}

sd_status sd_options_to_json(const sd_options* options, char** out_json) {
  return guarded([&] {
    need(options, "options");
    set_out(out_json, options->values.dump());
  });
}

// ---- LLM clients ----

sd_status sd_llm_client_create_mock(sd_llm_client** out) {
  return guarded([&] {
    need(out, "out");
    auto c = std::make_unique<sd_llm_client>();
    c->impl = std::make_unique<RuleBasedMockClient>();
    *out = c.release();
  });
}

sd_status sd_llm_client_create_chat(const sd_options* options, sd_llm_client** out) {
  return guarded([&] {
    need(out, "out");
    ChatClientConfig config;
    config.base_url = get_or<std::string>(options, "base_url", config.base_url);
    config.endpoint = get_or<std::string>(options, "endpoint", config.endpoint);
    config.model = get_or<std::string>(options, "model", config.model);
    config.temperature = get_or<double>(options, "temperature", config.temperature);
    config.max_tokens = get_or<int>(options, "max_tokens", config.max_tokens);
    config.timeout_seconds = get_or<int>(options, "timeout_seconds", config.timeout_seconds);
    const auto env = get_or<std::string>(options, "api_key_env", "OPENAI_API_KEY");
    const char* key = std::getenv(env.c_str());
    if (key == nullptr || *key == '\0')
      throw std::invalid_argument("no API key: set " + env + " or use the mock client");
    config.api_key = key;
    auto c = std::make_unique<sd_llm_client>();
    c->impl = std::make_unique<ChatCompletionsClient>(std::move(config));
    *out = c.release();
  });
}

size_t sd_llm_client_requests(const sd_llm_client* client) {
  return client == nullptr ? 0 : client->requests.load();
}

void sd_llm_client_destroy(sd_llm_client* client) { delete client; }

// ---- distillation sets ----

sd_status sd_synthesize(const char* corpus_path, sd_llm_client* client, const sd_options* options,
                        sd_distill_set** out, char** out_diagnostics_json) {
  return guarded([&] {
    need(corpus_path, "corpus_path");
    need(client, "client");
    need(out, "out");
    SynthOptions so;
    so.n = get_or<std::size_t>(options, "n", so.n);
    so.parallelism = get_or<std::size_t>(options, "parallelism", so.parallelism);
    so.retry.max_attempts = get_or<std::size_t>(options, "max_attempts", so.retry.max_attempts);
    so.retry.initial_backoff = std::chrono::milliseconds(
        get_or<std::size_t>(options, "initial_backoff_ms", so.retry.initial_backoff.count()));
    so.retry.max_backoff = std::chrono::milliseconds(
        get_or<std::size_t>(options, "max_backoff_ms", so.retry.max_backoff.count()));
    so.corpus_name = get_or<std::string>(options, "corpus_name", so.corpus_name);
    if (so.n == 0) throw std::invalid_argument("n must be positive");
    if (so.parallelism == 0) throw std::invalid_argument("parallelism must be positive");
    if (so.retry.max_attempts == 0) throw std::invalid_argument("max_attempts must be positive");

    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw DataError(std::string("cannot read corpus ") + corpus_path);
    CountingClient counting(*client->impl, client->requests);
    auto result = synthesize(paragraphs_from_stream(in), counting, so);
    if (in.bad()) throw DataError(std::string("read error in corpus ") + corpus_path);
    auto set = std::make_unique<sd_distill_set>();
    set->records = std::move(result.records);
    set_out(out_diagnostics_json, diagnostics_to_json(result.diagnostics).dump(2));
    *out = set.release();
  });
}

sd_status sd_distill_set_load(const char* path, sd_distill_set** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto set = std::make_unique<sd_distill_set>();
    set->records = read_records(path);
    *out = set.release();
  });
}

sd_status sd_distill_set_save(const sd_distill_set* set, const char* path) {
  return guarded([&] {
    need(set, "set");
    need(path, "path");
    write_file_atomic(path, records_to_jsonl(set->records));
  });
}

size_t sd_distill_set_size(const sd_distill_set* set) { return set == nullptr ? 0 : set->records.size(); }

size_t sd_distill_set_failed(const sd_distill_set* set) {
  if (set == nullptr) return 0;
  return static_cast<size_t>(std::count_if(set->records.begin(), set->records.end(),
                                           [](const DistillRecord& r) { return r.error.has_value(); }));
}

sd_status sd_distill_set_subsample(const sd_distill_set* set, size_t k, uint64_t seed,
                                   sd_distill_set** out) {
  return guarded([&] {
    need(set, "set");
    need(out, "out");
    auto sub = std::make_unique<sd_distill_set>();
    sub->records = subsample(set->records, k, seed);
    *out = sub.release();
  });
}

sd_status sd_distill_set_label_stats(const sd_distill_set* set, size_t top_k, int as_json, char** out) {
  return guarded([&] {
    need(set, "set");
    const auto stats = label_stats(set->records, top_k);
    set_out(out, as_json != 0 ? label_stats_to_json(stats).dump(2) + "\n" : label_stats_to_text(stats));
  });
}

void sd_distill_set_destroy(sd_distill_set* set) { delete set; }

// ---- schemas and task sets ----

sd_status sd_schema_default(const char* task, sd_schema** out) {
  return guarded([&] {
    need(task, "task");
    need(out, "out");
    auto s = std::make_unique<sd_schema>();
    s->schema = default_schema(parse_task(task));
    *out = s.release();
  });
}

sd_status sd_schema_load(const char* path, sd_schema** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto s = std::make_unique<sd_schema>();
    try {
      s->schema = schema_from_json(Json::parse(read_file(path)));
    } catch (const Json::exception& e) {
      throw DataError(std::string(path) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string(path) + ": " + e.what());
    }
    *out = s.release();
  });
}

sd_status sd_schema_to_json(const sd_schema* schema, char** out_json) {
  return guarded([&] {
    need(schema, "schema");
    set_out(out_json, schema_to_json(schema->schema).dump());
  });
}

const char* sd_schema_task(const sd_schema* schema) {
  return schema == nullptr ? "" : task_name(schema->schema.task).data();
}

void sd_schema_destroy(sd_schema* schema) { delete schema; }

sd_status sd_task_set_load(const char* path, const sd_schema* schema, sd_task_set** out) {
  return guarded([&] {
    need(path, "path");
    need(schema, "schema");
    need(out, "out");
    auto set = std::make_unique<sd_task_set>();
    set->task = schema->schema.task;
    set->items = read_task_items(path, set->task);
    *out = set.release();
  });
}

size_t sd_task_set_size(const sd_task_set* set) { return set == nullptr ? 0 : set->items.size(); }

sd_status sd_task_set_fewshot(const sd_task_set* set, const sd_schema* schema, const sd_options* options,
                              sd_task_set** out, char** out_info_json) {
  return guarded([&] {
    need(set, "set");
    need(schema, "schema");
    need(out, "out");
    FewShotSpec spec = schema->schema.fewshot;
    if (const Json* rule = find(options, "rule")) {
      const auto name = rule->is_string() ? rule->get<std::string>() : rule->dump();
      if (name == "per-label") spec.rule = FewShotRule::PerLabelK;
      else if (name == "fraction") spec.rule = FewShotRule::Fraction;
      else if (name == "absolute") spec.rule = FewShotRule::Absolute;
      else throw std::invalid_argument("unknown few-shot rule '" + name + "'");
    }
    spec.k = get_or<std::size_t>(options, "k", spec.k);
    spec.fraction = get_or<double>(options, "fraction", spec.fraction);
    spec.count = get_or<std::size_t>(options, "count", spec.count);
    spec.seed = get_or<std::uint64_t>(options, "seed", spec.seed);
    spec.validate();
    const auto result = fewshot_sample(set->items, schema->schema, spec);
    auto sub = std::make_unique<sd_task_set>();
    sub->task = set->task;
    for (const auto i : result.indices) sub->items.push_back(set->items[i]);
    const char* rule_names[] = {"per-label", "fraction", "absolute"};
    Json info = {{"rule", rule_names[static_cast<int>(spec.rule)]},
                 {"k", spec.k},
                 {"fraction", spec.fraction},
                 {"count", spec.count},
                 {"seed", spec.seed},
                 {"dataset_size", set->items.size()},
                 {"selected", result.indices.size()},
                 {"indices", result.indices},
                 {"warnings", result.warnings}};
    set_out(out_info_json, info.dump(2));
    *out = sub.release();
  });
}

sd_status sd_task_set_save(const sd_task_set* set, const char* path) {
  return guarded([&] {
    need(set, "set");
    need(path, "path");
    write_file_atomic(path, task_items_to_jsonl(set->items, set->task));
  });
}

void sd_task_set_destroy(sd_task_set* set) { delete set; }

// ---- examples ----

sd_status sd_example_set_from_distill(const sd_distill_set* set, size_t negatives_per_record, uint64_t seed,
                                      sd_example_set** out, char** out_stats_json) {
  return guarded([&] {
    need(set, "set");
    need(out, "out");
    DistillExampleStats stats;
    auto ex = std::make_unique<sd_example_set>();
    ex->examples = distill_to_training(set->records, negatives_per_record, seed, &stats);
    Json j = {{"records", set->records.size()},
              {"positives", stats.positives},
              {"negatives", stats.negatives},
              {"overlapping_spans_dropped", stats.overlapping_spans_dropped}};
    set_out(out_stats_json, j.dump(2));
    *out = ex.release();
  });
}

sd_status sd_example_set_from_task(const sd_schema* schema, const sd_task_set* set, sd_example_set** out,
                                   char** out_diagnostics_json) {
  return guarded([&] {
    need(schema, "schema");
    need(set, "set");
    need(out, "out");
    ExampleDiagnostics diag;
    auto ex = std::make_unique<sd_example_set>();
    ex->examples = to_training_examples(schema->schema, set->items, &diag);
    Json j = {{"items", diag.items},
              {"examples", diag.examples},
              {"negatives", diag.negatives},
              {"skipped", diag.skipped},
              {"messages", diag.messages}};
    set_out(out_diagnostics_json, j.dump(2));
    *out = ex.release();
  });
}

sd_status sd_example_set_load(const char* path, sd_example_set** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto ex = std::make_unique<sd_example_set>();
    ex->examples = read_examples(path);
    *out = ex.release();
  });
}

size_t sd_example_set_size(const sd_example_set* set) { return set == nullptr ? 0 : set->examples.size(); }

sd_status sd_example_set_save(const sd_example_set* set, const char* format, const char* path) {
  return guarded([&] {
    need(set, "set");
    need(path, "path");
    const std::string f = format == nullptr ? "bio" : format;
    std::string content;
    if (f == "bio") {
      content = examples_to_jsonl(set->examples);
    } else if (f == "seq2seq") {
      for (const auto& e : set->examples) {
        const auto p = convert_seq2seq(e);
        content += Json({{"input", p.input}, {"target", p.target}}).dump() + "\n";
      }
    } else if (f == "causal") {
      for (const auto& e : set->examples) {
        const auto c = convert_causal(e);
        content += Json({{"text", c.text}, {"target_begin", c.target_begin}, {"target_end", c.target_end}})
                       .dump() +
                   "\n";
      }
    } else {
      throw std::invalid_argument("unknown export format '" + f + "' (bio, seq2seq, causal)");
    }
    write_file_atomic(path, content);
  });
}

void sd_example_set_destroy(sd_example_set* set) { delete set; }

// ---- taggers ----

sd_status sd_tagger_create_toy(const sd_options* options, sd_tagger** out) {
  return guarded([&] {
    need(out, "out");
    ToyTaggerOptions o;
    o.hash_bits = get_or<unsigned>(options, "hash_bits", o.hash_bits);
    o.window = get_or<unsigned>(options, "window", o.window);
    auto t = std::make_unique<sd_tagger>();
    t->impl = std::make_unique<ToyTagger>(o);
    t->kind = t->impl->kind();
    *out = t.release();
  });
}

sd_status sd_tagger_create_oracle(const sd_schema* schema, const sd_task_set* set, sd_tagger** out) {
  return guarded([&] {
    need(schema, "schema");
    need(set, "set");
    need(out, "out");
    const auto examples = to_training_examples(schema->schema, set->items);
    auto t = std::make_unique<sd_tagger>();
    t->impl = std::make_unique<OracleTagger>(examples);
    t->kind = t->impl->kind();
    *out = t.release();
  });
}

sd_status sd_tagger_load(const char* path, sd_tagger** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto t = std::make_unique<sd_tagger>();
    t->impl = std::make_unique<ToyTagger>(ToyTagger::load(path));
    t->kind = t->impl->kind();
    *out = t.release();
  });
}

sd_status sd_tagger_save(const sd_tagger* tagger, const char* path) {
  return guarded([&] {
    need(tagger, "tagger");
    need(path, "path");
    const auto* toy = dynamic_cast<const ToyTagger*>(tagger->impl.get());
    if (toy == nullptr) throw std::invalid_argument("only toy taggers can be saved");
    toy->save(path);
  });
}

sd_status sd_tagger_clone(const sd_tagger* tagger, sd_tagger** out) {
  return guarded([&] {
    need(tagger, "tagger");
    need(out, "out");
    auto t = std::make_unique<sd_tagger>();
    t->impl = tagger->impl->clone();
    t->kind = tagger->kind;
    *out = t.release();
  });
}

const char* sd_tagger_kind(const sd_tagger* tagger) { return tagger == nullptr ? "" : tagger->kind.c_str(); }

sd_status sd_tagger_predict(const sd_tagger* tagger, const char* label, const char* sentence, char** out_json) {
  return guarded([&] {
    need(tagger, "tagger");
    need(label, "label");
    need(sentence, "sentence");
    const auto tokens = tokenize(sentence);
    if (tokens.empty()) throw std::invalid_argument("sentence has no tokens");
    const auto query = encode_query(label, tokens);
    Json spans = Json::array();
    for (const auto& s : decode_with_probs(tagger->impl->predict(query), query.label)) {
      spans.push_back({{"start", s.range.begin},
                       {"end", s.range.end},
                       {"text", detokenize(std::span<const std::string>(tokens).subspan(s.range.begin, s.range.size()))},
                       {"score", s.score}});
    }
    set_out(out_json, spans.dump());
  });
}

void sd_tagger_destroy(sd_tagger* tagger) { delete tagger; }

// ---- training and evaluation ----

sd_status sd_train_config(const sd_options* options, char** out_json) {
  return guarded([&] { set_out(out_json, train_config_to_json(train_config(options)).dump()); });
}

sd_status sd_train(sd_tagger* tagger, const sd_example_set* examples, const sd_options* options,
                   char** out_summary_json, char** out_log_jsonl) {
  return guarded([&] {
    need(tagger, "tagger");
    need(examples, "examples");
    const auto config = train_config(options);
    const auto log = fit_tagger(*tagger->impl, examples->examples, config);
    Json summary = training_log_to_json(log);
    summary["config"] = train_config_to_json(config);
    set_out(out_summary_json, summary.dump(2));
    set_out(out_log_jsonl, training_log_to_jsonl(log));
  });
}

sd_status sd_evaluate(const sd_tagger* tagger, const sd_schema* schema, const sd_task_set* set, const char* mode,
                      size_t parallelism, const char* run_name, char** out_report_json, char** out_table,
                      char** out_csv) {
  return guarded([&] {
    need(tagger, "tagger");
    need(schema, "schema");
    need(set, "set");
    if (parallelism == 0) throw std::invalid_argument("parallelism must be positive");
    const auto m = parse_mode(mode == nullptr ? "full" : mode);
    const auto report = evaluate_run(schema->schema, *tagger->impl, set->items, m, parallelism);
    set_out(out_report_json, eval_report_to_json(report).dump(2));
    set_out(out_table, report.to_table());
    set_out(out_csv, report.to_csv(run_name == nullptr ? "run" : run_name));
  });
}

// ---- files and manifests ----

sd_status sd_file_sha256(const char* path, char** out_hex) {
  return guarded([&] {
    need(path, "path");
    set_out(out_hex, sha256_file(path));
  });
}

sd_status sd_write_file(const char* path, const char* data, size_t size) {
  return guarded([&] {
    need(path, "path");
    if (size > 0) need(data, "data");
    write_file_atomic(path, std::string_view(data == nullptr ? "" : data, size));
  });
}

sd_status sd_manifest_write(const char* path, const char* command, const sd_options* config,
                            const char* const* dataset_paths, size_t dataset_count, uint64_t seed) {
  return guarded([&] {
    need(path, "path");
    need(command, "command");
    if (dataset_count > 0) need(dataset_paths, "dataset_paths");
    Json datasets = Json::array();
    for (size_t i = 0; i < dataset_count; ++i) {
      need(dataset_paths[i], "dataset path");
      datasets.push_back({{"path", dataset_paths[i]}, {"sha256", sha256_file(dataset_paths[i])}});
    }
    Json manifest = {{"command", command},
                     {"config", config == nullptr ? Json::object() : config->values},
                     {"datasets", std::move(datasets)},
                     {"seed", seed},
                     {"version", SPANDISTILL_VERSION},
                     {"prompt_version", kPromptVersion},
                     {"started_at", utc_timestamp()}};
    write_file_atomic(path, manifest.dump(2) + "\n");
  });
}

}  // extern "C"
