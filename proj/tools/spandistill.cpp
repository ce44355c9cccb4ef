// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

// spandistill command-line tool. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spandistill/spandistill.h"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 ok, 1 usage, 2 data, 3 upstream.
struct Failure {
  int code;
  std::string message;
};

int exit_code(sd_status s) {
  switch (s) {
    case SD_OK:
      return 0;
    case SD_ERR_USAGE:
      return 1;
    case SD_ERR_UPSTREAM:
      return 3;
    default:
      return 2;
  }
}

void check(sd_status s, const std::string& context) {
  if (s != SD_OK) throw Failure{exit_code(s), context + ": " + sd_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{1, message}; }

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Options = std::unique_ptr<sd_options, Deleter<sd_options, sd_options_destroy>>;
using Client = std::unique_ptr<sd_llm_client, Deleter<sd_llm_client, sd_llm_client_destroy>>;
using DistillSet = std::unique_ptr<sd_distill_set, Deleter<sd_distill_set, sd_distill_set_destroy>>;
using ExampleSet = std::unique_ptr<sd_example_set, Deleter<sd_example_set, sd_example_set_destroy>>;
using Schema = std::unique_ptr<sd_schema, Deleter<sd_schema, sd_schema_destroy>>;
using TaskSet = std::unique_ptr<sd_task_set, Deleter<sd_task_set, sd_task_set_destroy>>;
using Tagger = std::unique_ptr<sd_tagger, Deleter<sd_tagger, sd_tagger_destroy>>;

// Takes ownership of a C string from the library.
std::string take(char* s) {
  if (s == nullptr) return {};
  std::string out(s);
  sd_string_free(s);
  return out;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (const unsigned char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

// Flags that feed the options bag. Only flags given on the command line are
// copied, so config files can fill in the rest.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  CLI::Option* value(const std::string& flag, const std::string& key, const std::string& help) {
    return add(flag, key, help, false);
  }
  CLI::Option* text(const std::string& flag, const std::string& key, const std::string& help) {
    return add(flag, key, help, true);
  }
  CLI::Option* boolean(const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = app_->add_flag(flag, help);
    switch_keys_.emplace_back(opt, key);
    return opt;
  }

  void config_flag() {
    app_->add_option("--config", config_, "JSON object of option defaults; flags take precedence");
  }

  // Flags first, then the config file, then built-in defaults downstream.
  Options resolve() const {
    Options o(sd_options_create());
    if (!o) throw Failure{2, "out of memory"};
    for (const auto& e : entries_) {
      if (e.option->count() == 0) continue;
      const auto v = e.quoted ? json_quote(*e.storage) : *e.storage;
      check(sd_options_set(o.get(), e.key.c_str(), v.c_str()), "option " + e.key);
    }
    for (const auto& [opt, key] : switch_keys_) {
      if (opt->count() > 0) check(sd_options_set(o.get(), key.c_str(), "true"), "option " + key);
    }
    if (!config_.empty()) check(sd_options_merge_file(o.get(), config_.c_str(), 0), "config");
    return o;
  }

  const std::string& config_path() const { return config_; }

 private:
  struct Entry {
    CLI::Option* option;
    std::string key;
    std::shared_ptr<std::string> storage;
    bool quoted;
  };

  CLI::Option* add(const std::string& flag, const std::string& key, const std::string& help, bool quoted) {
    auto storage = std::make_shared<std::string>();
    auto* opt = app_->add_option(flag, *storage, help);
    entries_.push_back({opt, key, storage, quoted});
    return opt;
  }

  CLI::App* app_;
  std::vector<Entry> entries_;
  std::vector<std::pair<CLI::Option*, std::string>> switch_keys_;
  std::string config_;
};

void set_option(sd_options* o, const std::string& key, const std::string& json_value) {
  check(sd_options_set(o, key.c_str(), json_value.c_str()), "option " + key);
}

bool flag_true(const sd_options* o, const char* key) {
  int v = 0;
  check(sd_options_get_bool(o, key, 0, &v), "option " + std::string(key));
  return v != 0;
}

std::uint64_t option_u64(const sd_options* o, const char* key, std::uint64_t fallback) {
  std::uint64_t v = 0;
  check(sd_options_get_u64(o, key, fallback, &v), "option " + std::string(key));
  return v;
}

void write_manifest(const fs::path& path, const std::string& command, const sd_options* config,
                    const std::vector<std::string>& datasets, std::uint64_t seed) {
  std::vector<const char*> ptrs;
  for (const auto& d : datasets) ptrs.push_back(d.c_str());
  check(sd_manifest_write(path.c_str(), command.c_str(), config, ptrs.data(), ptrs.size(), seed), "manifest");
}

void write_text(const fs::path& path, const std::string& content) {
  check(sd_write_file(path.c_str(), content.data(), content.size()), "write " + path.string());
}

void require_readable(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{2, "cannot read " + what + " " + path};
  // inputs are read twice: once for the manifest hash, once for the data
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Failure{2, what + " " + path + " is not a regular file"};
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) out += ' ';
    out += argv[i];
  }
  return out;
}

fs::path sidecar(const std::string& out, const char* suffix) { return fs::path(out + suffix); }

// Task schema from --task-config or --task.
Schema load_schema(const std::string& task, const std::string& task_config) {
  sd_schema* s = nullptr;
  if (!task_config.empty()) {
    check(sd_schema_load(task_config.c_str(), &s), "task config");
  } else if (!task.empty()) {
    check(sd_schema_default(task.c_str(), &s), "task");
  } else {
    usage("one of --task or --task-config is required");
  }
  return Schema(s);
}

struct TaskFlags {
  std::string task;
  std::string task_config;

  void add(CLI::App* app) {
    auto* t = app->add_option("--task", task, "Task family: ner, re, ee, srl, absa, aste");
    auto* c = app->add_option("--task-config", task_config, "Task config JSON (label sets, templates)");
    t->excludes(c);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distill LLM annotations into label-to-span taggers and evaluate them"};
  app.set_version_flag("--version", sd_version());
  app.require_subcommand(1);
  const auto invocation = command_line(argc, argv);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Annotate corpus sentences with an LLM into a JSONL dataset");
  FlagSet synth_flags(synth);
  std::string corpus, synth_out;
  synth->add_option("--corpus", corpus, "Corpus file, one paragraph per line")->required();
  synth->add_option("--out", synth_out, "Output dataset (JSONL)")->required();
  synth_flags.value("--n", "n", "Sentences to annotate (default 100000)")->check(CLI::PositiveNumber);
  synth_flags.value("--parallelism", "parallelism", "Concurrent requests (default 1)")->check(CLI::PositiveNumber);
  synth_flags.value("--max-attempts", "max_attempts", "Attempts per request (default 4)")->check(CLI::PositiveNumber);
  synth_flags.value("--initial-backoff-ms", "initial_backoff_ms", "First retry delay (default 500)")
      ->check(CLI::NonNegativeNumber);
  synth_flags.value("--max-backoff-ms", "max_backoff_ms", "Retry delay cap (default 8000)")->check(CLI::NonNegativeNumber);
  synth_flags.text("--corpus-name", "corpus_name", "Sentence id prefix (default corpus)");
  synth_flags.text("--model", "model", "Chat model (default gpt-3.5-turbo)");
  synth_flags.text("--base-url", "base_url", "API base URL (default https://api.openai.com)");
  synth_flags.text("--endpoint", "endpoint", "Chat completions path (default /v1/chat/completions)");
  synth_flags.value("--temperature", "temperature", "Sampling temperature (default 0)")->check(CLI::NonNegativeNumber);
  synth_flags.value("--max-tokens", "max_tokens", "Completion token limit (default 512)")->check(CLI::PositiveNumber);
  synth_flags.value("--timeout", "timeout_seconds", "Request timeout in seconds (default 60)")->check(CLI::PositiveNumber);
  synth_flags.text("--api-key-env", "api_key_env", "Environment variable holding the API key (default OPENAI_API_KEY)");
  synth_flags.boolean("--mock", "mock", "Use the offline rule-based annotator instead of an API");
  synth_flags.config_flag();

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "Label frequency report grouped by label length");
  std::string stats_data, stats_out;
  std::size_t top_k = 20;
  bool stats_json = false;
  stats->add_option("--data", stats_data, "Distillation dataset (JSONL)")->required();
  stats->add_option("--top-k", top_k, "Labels shown per bucket, 0 for all")->capture_default_str();
  stats->add_flag("--json", stats_json, "Emit JSON instead of a table");
  stats->add_option("--out", stats_out, "Write the report here instead of stdout");

  // ---- encode ----
  auto* encode = app.add_subcommand("encode", "Convert a dataset to tagged training examples");
  std::string encode_distill, encode_task_data, encode_out, encode_format = "bio";
  std::size_t negatives = 1;
  std::uint64_t encode_seed = 0;
  TaskFlags encode_task;
  auto* ed = encode->add_option("--distill", encode_distill, "Distillation dataset (JSONL)");
  auto* et = encode->add_option("--task-data", encode_task_data, "Task dataset (JSONL)");
  ed->excludes(et);
  encode_task.add(encode);
  encode->add_option("--out", encode_out, "Output file (JSONL)")->required();
  encode->add_option("--format", encode_format, "bio, seq2seq or causal")
      ->check(CLI::IsMember({"bio", "seq2seq", "causal"}))
      ->capture_default_str();
  encode->add_option("--negatives", negatives, "Negative queries per distilled sentence")->capture_default_str();
  encode->add_option("--seed", encode_seed, "Seed for negative sampling")->capture_default_str();

  // ---- fewshot ----
  auto* fewshot = app.add_subcommand("fewshot", "Sample a few-shot training subset of a task dataset");
  FlagSet fewshot_flags(fewshot);
  std::string fewshot_data, fewshot_out;
  TaskFlags fewshot_task;
  fewshot_task.add(fewshot);
  fewshot->add_option("--data", fewshot_data, "Task dataset (JSONL)")->required();
  fewshot->add_option("--out", fewshot_out, "Subset file (JSONL, original lines)")->required();
  fewshot_flags.text("--rule", "rule", "per-label, fraction or absolute (default: the task's protocol)")
      ->check(CLI::IsMember({"per-label", "fraction", "absolute"}));
  fewshot_flags.value("--k", "k", "Sentences per label for per-label sampling")->check(CLI::PositiveNumber);
  fewshot_flags.value("--fraction", "fraction", "Share of the dataset for fraction sampling")
      ->check(CLI::Range(0.0, 1.0));
  fewshot_flags.value("--count", "count", "Sentences for absolute sampling")->check(CLI::PositiveNumber);
  fewshot_flags.value("--seed", "seed", "Sampling seed (default 0)")->check(CLI::NonNegativeNumber);
  fewshot_flags.config_flag();

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train or fine-tune a tagger into a run directory");
  FlagSet train_flags(train);
  std::string run_dir, train_distill, train_examples, train_task_data, init_model;
  std::optional<std::size_t> subsample_k;
  TaskFlags train_task;
  train->add_option("--run-dir", run_dir, "Directory for model.bin, train_log.jsonl and manifest.json")->required();
  auto* td = train->add_option("--distill", train_distill, "Distillation dataset (JSONL)");
  auto* tx = train->add_option("--examples", train_examples, "Tagged examples (JSONL from encode)");
  auto* tt = train->add_option("--task-data", train_task_data, "Task dataset (JSONL)");
  td->excludes(tx)->excludes(tt);
  tx->excludes(tt);
  train_task.add(train);
  train->add_option("--subsample", subsample_k, "Train on this many distilled records")->needs(td);
  train_flags.value("--negatives", "negatives", "Negative queries per distilled record (default 1)")
      ->needs(td)
      ->check(CLI::NonNegativeNumber);
  train->add_option("--init", init_model, "Start from this checkpoint");
  train_flags.value("--hash-bits", "hash_bits", "Toy tagger feature table size as log2 (default 18)")
      ->check(CLI::Range(8, 26));
  train_flags.value("--window", "window", "Toy tagger context window (default 2)")->check(CLI::Range(1, 5));
  train_flags.value("--lr", "learning_rate", "Learning rate (default 2e-5)")->check(CLI::PositiveNumber);
  train_flags.value("--batch-size", "batch_size", "Batch size (default 64)")->check(CLI::PositiveNumber);
  train_flags.value("--epochs", "epochs", "Epochs (default 1)")->check(CLI::PositiveNumber);
  train_flags.value("--seed", "seed", "Seed for shuffling and sampling (default 0)")->check(CLI::NonNegativeNumber);
  train_flags.value("--weight-decay", "weight_decay", "AdamW weight decay (default 0.01)")->check(CLI::NonNegativeNumber);
  train_flags.text("--schedule", "schedule", "cosine or constant (default cosine)")
      ->check(CLI::IsMember({"cosine", "constant"}));
  train_flags.config_flag();

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Score a tagger on a task dataset");
  std::string eval_data, eval_model, eval_mode = "full", eval_out, eval_csv, run_name = "run";
  std::size_t eval_parallelism = 1;
  bool use_oracle = false;
  TaskFlags eval_task;
  eval_task.add(eval);
  eval->add_option("--data", eval_data, "Task dataset (JSONL)")->required();
  auto* em = eval->add_option("--model", eval_model, "Checkpoint to evaluate");
  auto* eo = eval->add_flag("--oracle", use_oracle, "Replay the dataset's gold answers");
  em->excludes(eo);
  eval->add_option("--mode", eval_mode, "full, re-entity, re-relation, ee-trigger-unlabeled, ee-argument-unlabeled")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Report (JSON)")->required();
  eval->add_option("--csv", eval_csv, "Also write a CSV row per label");
  eval->add_option("--run-name", run_name, "Run name in the CSV")->capture_default_str();
  eval->add_option("--parallelism", eval_parallelism, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      auto opts = synth_flags.resolve();
      set_option(opts.get(), "corpus", json_quote(corpus));
      check(sd_options_fill_defaults(opts.get(), "synth", nullptr), "defaults");
      require_readable(corpus, "corpus");
      sd_llm_client* raw = nullptr;
      if (flag_true(opts.get(), "mock")) {
        check(sd_llm_client_create_mock(&raw), "mock client");
      } else {
        check(sd_llm_client_create_chat(opts.get(), &raw), "chat client");
      }
      Client client(raw);
      write_manifest(sidecar(synth_out, ".manifest.json"), invocation, opts.get(), {corpus}, 0);
      sd_distill_set* set = nullptr;
      char* diag = nullptr;
      check(sd_synthesize(corpus.c_str(), client.get(), opts.get(), &set, &diag), "synth");
      DistillSet records(set);
      const auto diagnostics = take(diag);
      check(sd_distill_set_save(records.get(), synth_out.c_str()), "save dataset");
      write_text(sidecar(synth_out, ".diagnostics.json"), diagnostics + "\n");
      const auto n = sd_distill_set_size(records.get());
      const auto failed = sd_distill_set_failed(records.get());
      std::cerr << "wrote " << n << " records to " << synth_out << " (" << failed << " failed, "
                << sd_llm_client_requests(client.get()) << " requests)\n";
      if (n > 0 && failed == n) throw Failure{3, "every LLM request failed; see " + synth_out};
      return 0;
    }

    if (stats->parsed()) {
      sd_distill_set* set = nullptr;
      check(sd_distill_set_load(stats_data.c_str(), &set), "load");
      DistillSet records(set);
      char* report = nullptr;
      check(sd_distill_set_label_stats(records.get(), top_k, stats_json ? 1 : 0, &report), "stats");
      const auto text = take(report);
      if (stats_out.empty()) {
        std::cout << text;
      } else {
        Options opts(sd_options_create());
        set_option(opts.get(), "top_k", std::to_string(top_k));
        set_option(opts.get(), "json", stats_json ? "true" : "false");
        write_manifest(sidecar(stats_out, ".manifest.json"), invocation, opts.get(), {stats_data}, 0);
        write_text(stats_out, text);
      }
      return 0;
    }

    if (encode->parsed()) {
      if (encode_distill.empty() == encode_task_data.empty()) usage("give exactly one of --distill or --task-data");
      Options opts(sd_options_create());
      set_option(opts.get(), "format", json_quote(encode_format));
      sd_example_set* raw = nullptr;
      char* info = nullptr;
      std::vector<std::string> inputs;
      if (!encode_distill.empty()) {
        set_option(opts.get(), "negatives", std::to_string(negatives));
        set_option(opts.get(), "seed", std::to_string(encode_seed));
        sd_distill_set* set = nullptr;
        check(sd_distill_set_load(encode_distill.c_str(), &set), "load");
        DistillSet records(set);
        inputs.push_back(encode_distill);
        write_manifest(sidecar(encode_out, ".manifest.json"), invocation, opts.get(), inputs, encode_seed);
        check(sd_example_set_from_distill(records.get(), negatives, encode_seed, &raw, &info), "encode");
      } else {
        auto schema = load_schema(encode_task.task, encode_task.task_config);
        set_option(opts.get(), "task", json_quote(sd_schema_task(schema.get())));
        sd_task_set* set = nullptr;
        check(sd_task_set_load(encode_task_data.c_str(), schema.get(), &set), "load");
        TaskSet items(set);
        inputs.push_back(encode_task_data);
        if (!encode_task.task_config.empty()) inputs.push_back(encode_task.task_config);
        write_manifest(sidecar(encode_out, ".manifest.json"), invocation, opts.get(), inputs, 0);
        check(sd_example_set_from_task(schema.get(), items.get(), &raw, &info), "encode");
      }
      ExampleSet examples(raw);
      std::cerr << take(info) << "\n";
      check(sd_example_set_save(examples.get(), encode_format.c_str(), encode_out.c_str()), "save");
      return 0;
    }

    if (fewshot->parsed()) {
      auto schema = load_schema(fewshot_task.task, fewshot_task.task_config);
      auto opts = fewshot_flags.resolve();
      check(sd_options_fill_defaults(opts.get(), "fewshot", schema.get()), "defaults");
      set_option(opts.get(), "task", json_quote(sd_schema_task(schema.get())));
      sd_task_set* set = nullptr;
      check(sd_task_set_load(fewshot_data.c_str(), schema.get(), &set), "load");
      TaskSet items(set);
      std::vector<std::string> inputs{fewshot_data};
      if (!fewshot_task.task_config.empty()) inputs.push_back(fewshot_task.task_config);
      if (!fewshot_flags.config_path().empty()) inputs.push_back(fewshot_flags.config_path());
      sd_task_set* sub = nullptr;
      char* info = nullptr;
      // Validate the sampling options before the manifest goes out.
      check(sd_task_set_fewshot(items.get(), schema.get(), opts.get(), &sub, &info), "fewshot");
      TaskSet subset(sub);
      const auto info_json = take(info);
      write_manifest(sidecar(fewshot_out, ".manifest.json"), invocation, opts.get(), inputs,
                     option_u64(opts.get(), "seed", 0));
      check(sd_task_set_save(subset.get(), fewshot_out.c_str()), "save");
      std::cerr << info_json << "\n";
      return 0;
    }

    if (train->parsed()) {
      const int sources = !train_distill.empty() + !train_examples.empty() + !train_task_data.empty();
      if (sources != 1) usage("give exactly one of --distill, --examples or --task-data");
      auto opts = train_flags.resolve();
      char* resolved = nullptr;
      check(sd_train_config(opts.get(), &resolved), "training config");
      take(resolved);
      check(sd_options_fill_defaults(opts.get(), "train", nullptr), "defaults");
      const auto seed = option_u64(opts.get(), "seed", 0);

      std::vector<std::string> inputs;
      sd_example_set* raw = nullptr;
      char* info = nullptr;
      std::optional<std::size_t> record_count;
      if (!train_distill.empty()) {
        sd_distill_set* set = nullptr;
        check(sd_distill_set_load(train_distill.c_str(), &set), "load");
        DistillSet records(set);
        if (subsample_k) {
          if (*subsample_k > sd_distill_set_size(records.get()))
            usage("--subsample " + std::to_string(*subsample_k) + " exceeds the " +
                  std::to_string(sd_distill_set_size(records.get())) + " records in " + train_distill);
          sd_distill_set* sub = nullptr;
          check(sd_distill_set_subsample(records.get(), *subsample_k, seed, &sub), "subsample");
          records.reset(sub);
          set_option(opts.get(), "subsample", std::to_string(*subsample_k));
        }
        record_count = sd_distill_set_size(records.get());
        const auto neg = option_u64(opts.get(), "negatives", 1);
        check(sd_example_set_from_distill(records.get(), neg, seed, &raw, &info), "encode");
        inputs.push_back(train_distill);
      } else if (!train_examples.empty()) {
        check(sd_example_set_load(train_examples.c_str(), &raw), "load");
        inputs.push_back(train_examples);
      } else {
        auto schema = load_schema(train_task.task, train_task.task_config);
        set_option(opts.get(), "task", json_quote(sd_schema_task(schema.get())));
        sd_task_set* set = nullptr;
        check(sd_task_set_load(train_task_data.c_str(), schema.get(), &set), "load");
        TaskSet items(set);
        check(sd_example_set_from_task(schema.get(), items.get(), &raw, &info), "encode");
        inputs.push_back(train_task_data);
        if (!train_task.task_config.empty()) inputs.push_back(train_task.task_config);
      }
      ExampleSet examples(raw);
      const auto encode_info = take(info);

      sd_tagger* t = nullptr;
      if (!init_model.empty()) {
        check(sd_tagger_load(init_model.c_str(), &t), "load model");
        inputs.push_back(init_model);
        set_option(opts.get(), "init", json_quote(init_model));
      } else {
        check(sd_tagger_create_toy(opts.get(), &t), "tagger");
      }
      Tagger tagger(t);
      if (!train_flags.config_path().empty()) inputs.push_back(train_flags.config_path());

      std::error_code ec;
      fs::create_directories(run_dir, ec);
      if (ec) throw Failure{2, "cannot create run directory " + run_dir + ": " + ec.message()};
      const fs::path dir(run_dir);
      write_manifest(dir / "manifest.json", invocation, opts.get(), inputs, seed);

      char* summary = nullptr;
      char* log = nullptr;
      check(sd_train(tagger.get(), examples.get(), opts.get(), &summary, &log), "train");
      auto summary_json = take(summary);
      const auto log_jsonl = take(log);
      if (record_count) {
        summary_json.insert(1, "\n  \"records\": " + std::to_string(*record_count) + ",");
      }
      check(sd_tagger_save(tagger.get(), (dir / "model.bin").c_str()), "save model");
      write_text(dir / "train_log.jsonl", log_jsonl);
      write_text(dir / "summary.json", summary_json + "\n");
      if (!encode_info.empty()) write_text(dir / "examples.json", encode_info + "\n");
      std::cerr << summary_json << "\n";
      return 0;
    }

    if (eval->parsed()) {
      if (eval_model.empty() == !use_oracle) usage("give exactly one of --model or --oracle");
      auto schema = load_schema(eval_task.task, eval_task.task_config);
      sd_task_set* set = nullptr;
      check(sd_task_set_load(eval_data.c_str(), schema.get(), &set), "load");
      TaskSet items(set);
      sd_tagger* t = nullptr;
      std::vector<std::string> inputs{eval_data};
      if (use_oracle) {
        check(sd_tagger_create_oracle(schema.get(), items.get(), &t), "oracle");
      } else {
        check(sd_tagger_load(eval_model.c_str(), &t), "load model");
        inputs.push_back(eval_model);
      }
      Tagger tagger(t);
      if (!eval_task.task_config.empty()) inputs.push_back(eval_task.task_config);
      Options opts(sd_options_create());
      set_option(opts.get(), "task", json_quote(sd_schema_task(schema.get())));
      set_option(opts.get(), "mode", json_quote(eval_mode));
      set_option(opts.get(), "tagger", json_quote(sd_tagger_kind(tagger.get())));
      set_option(opts.get(), "run_name", json_quote(run_name));
      write_manifest(sidecar(eval_out, ".manifest.json"), invocation, opts.get(), inputs, 0);
      char* report = nullptr;
      char* table = nullptr;
      char* csv = nullptr;
      check(sd_evaluate(tagger.get(), schema.get(), items.get(), eval_mode.c_str(), eval_parallelism,
                        run_name.c_str(), &report, &table, &csv),
            "eval");
      const auto report_json = take(report);
      const auto table_text = take(table);
      const auto csv_text = take(csv);
      write_text(eval_out, report_json + "\n");
      if (!eval_csv.empty()) write_text(eval_csv, csv_text);
      std::cout << table_text;
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "spandistill: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "spandistill: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
