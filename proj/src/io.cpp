// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/io.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "spandistill/error.hpp"
#include "spandistill/text.hpp"

namespace spandistill {
namespace fs = std::filesystem;

namespace {

DataError at_line(std::size_t line, const std::string& what) {
  return DataError("line " + std::to_string(line) + ": " + what);
}

// Runs `parse` on every non-blank line, wrapping failures with the line number.
template <typename F>
void for_each_json_line(std::istream& in, F&& parse) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw at_line(number, std::string("invalid JSON: ") + e.what());
    }
    try {
      parse(j, line, number);
    } catch (const DataError& e) {
      const std::string what = e.what();
      if (what.starts_with("line ")) throw;
      throw at_line(number, what);
    } catch (const Json::exception& e) {
      throw at_line(number, e.what());
    } catch (const std::invalid_argument& e) {
      throw at_line(number, e.what());
    }
  }
  if (in.bad()) throw DataError("read error after line " + std::to_string(number));
}

template <typename T, typename F>
std::vector<T> read_with(const fs::path& path, F&& from_stream) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return from_stream(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_array(const Json& v, const char* key) {
  if (!v.is_array()) throw DataError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

bool non_negative_integer(const Json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

std::size_t require_index(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!non_negative_integer(v))
    throw DataError(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("read error in " + path.string());
  return ss.str();
}

// ---- distillation records ----

Json record_to_json(const DistillRecord& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json jp = {{"label", p.label}, {"span", p.span_text}};
    if (p.range) {
      jp["start"] = p.range->begin;
      jp["end"] = p.range->end;
    }
    pairs.push_back(std::move(jp));
  }
  Json j = {{"id", r.sentence.id},
            {"text", r.sentence.text},
            {"tokens", r.sentence.tokens},
            {"pairs", std::move(pairs)},
            {"raw_response", r.raw_response}};
  if (r.error) j["error"] = *r.error;
  if (!r.sentence.origin.empty()) j["origin"] = r.sentence.origin;
  return j;
}

DistillRecord record_from_json(const Json& j) {
  DistillRecord r;
  r.sentence.id = require_string(j, "id");
  r.sentence.text = require_string(j, "text");
  if (j.contains("tokens")) {
    r.sentence.tokens = string_array(j["tokens"], "tokens");
  } else {
    r.sentence.tokens = tokenize(r.sentence.text);
  }
  if (j.contains("origin")) r.sentence.origin = require_string(j, "origin");
  if (j.contains("raw_response")) r.raw_response = require_string(j, "raw_response");
  if (j.contains("error")) r.error = require_string(j, "error");
  const auto& pairs = require(j, "pairs");
  if (!pairs.is_array()) throw DataError("field 'pairs' must be an array");
  for (const auto& jp : pairs) {
    LabelSpanPair p{require_string(jp, "label"), require_string(jp, "span"), std::nullopt};
    if (p.label.empty()) throw DataError("empty label");
    if (jp.contains("start") || jp.contains("end")) {
      const TokenRange range{require_index(jp, "start"), require_index(jp, "end")};
      if (range.begin >= range.end || range.end > r.sentence.tokens.size())
        throw DataError("pair '" + p.label + "' has range outside the sentence");
      p.range = range;
    }
    r.pairs.push_back(std::move(p));
  }
  return r;
}

std::string records_to_jsonl(std::span<const DistillRecord> records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

std::vector<DistillRecord> records_from_jsonl(std::istream& in) {
  std::vector<DistillRecord> out;
  std::set<std::string> ids;
  for_each_json_line(in, [&](const Json& j, const std::string&, std::size_t) {
    auto r = record_from_json(j);
    if (!ids.insert(r.sentence.id).second) throw DataError("duplicate id '" + r.sentence.id + "'");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<DistillRecord> read_records(const fs::path& path) {
  return read_with<DistillRecord>(path, [](std::istream& in) { return records_from_jsonl(in); });
}

// ---- tagged examples ----

Json example_to_json(const TaggedExample& e) {
  Json tags = Json::array();
  for (const auto t : e.tags) tags.push_back(std::string(1, tag_char(t)));
  return {{"label", e.label}, {"tokens", e.body_tokens}, {"tags", std::move(tags)}};
}

TaggedExample example_from_json(const Json& j) {
  const auto label = require_string(j, "label");
  const auto tokens = string_array(require(j, "tokens"), "tokens");
  const auto tags = string_array(require(j, "tags"), "tags");
  if (tokens.empty()) throw DataError("example has no tokens");
  if (tags.size() != tokens.size()) throw DataError("tags and tokens differ in length");
  auto e = encode_query(label, tokens);
  for (const auto& t : tags) e.tags.push_back(parse_tag(t));
  return e;
}

std::string examples_to_jsonl(std::span<const TaggedExample> examples) {
  std::string out;
  for (const auto& e : examples) out += example_to_json(e).dump() + "\n";
  return out;
}

std::vector<TaggedExample> examples_from_jsonl(std::istream& in) {
  std::vector<TaggedExample> out;
  for_each_json_line(in, [&](const Json& j, const std::string&, std::size_t) {
    out.push_back(example_from_json(j));
  });
  return out;
}

std::vector<TaggedExample> read_examples(const fs::path& path) {
  return read_with<TaggedExample>(path, [](std::istream& in) { return examples_from_jsonl(in); });
}

// ---- training config ----

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  if (!j.is_object()) throw DataError("training config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "epochs") c.epochs = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "weight_decay") c.weight_decay = v.get<double>();
      else if (key == "beta1") c.beta1 = v.get<double>();
      else if (key == "beta2") c.beta2 = v.get<double>();
      else if (key == "epsilon") c.epsilon = v.get<double>();
      else if (key == "optimizer") c.optimizer = v.get<std::string>();
      else if (key == "schedule") c.schedule = v.get<std::string>();
      else throw DataError("unknown training config key '" + key + "'");
    } catch (const Json::exception&) {
      throw DataError("training config key '" + key + "' has the wrong type");
    }
    if (key == "batch_size" || key == "epochs" || key == "seed") {
      if (!non_negative_integer(v))
        throw DataError("training config key '" + key + "' must be a non-negative integer");
    }
  }
  return c;
}

Json train_config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"epochs", c.epochs},               {"seed", c.seed},
          {"weight_decay", c.weight_decay},   {"beta1", c.beta1},
          {"beta2", c.beta2},                 {"epsilon", c.epsilon},
          {"optimizer", c.optimizer},         {"schedule", c.schedule}};
}

// ---- task schemas ----

namespace {

TypeLabels type_labels(const Json& v, const std::string& key) {
  TypeLabels out;
  if (v.is_object()) {
    for (const auto& [tag, label] : v.items()) {
      if (!label.is_string()) throw DataError("'" + key + "' values must be strings");
      out.emplace_back(tag, label.get<std::string>());
    }
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (e.is_string()) {
        out.emplace_back(e.get<std::string>(), e.get<std::string>());
      } else if (e.is_object()) {
        out.emplace_back(require_string(e, "tag"), require_string(e, "label"));
      } else {
        throw DataError("'" + key + "' entries must be strings or {tag, label} objects");
      }
    }
  } else {
    throw DataError("'" + key + "' must be an object or an array");
  }
  if (out.empty()) throw DataError("'" + key + "' is empty");
  return out;
}

TypeLabels stage_labels(const TaskSchema& s, std::size_t stage) {
  TypeLabels out;
  for (const auto& q : s.stages[stage].queries) out.emplace_back(q.tag, q.label_template);
  return out;
}

FewShotRule parse_rule(const std::string& name) {
  if (name == "per-label") return FewShotRule::PerLabelK;
  if (name == "fraction") return FewShotRule::Fraction;
  if (name == "absolute") return FewShotRule::Absolute;
  throw DataError("unknown few-shot rule '" + name + "' (per-label, fraction, absolute)");
}

std::string rule_name(FewShotRule r) {
  switch (r) {
    case FewShotRule::PerLabelK:
      return "per-label";
    case FewShotRule::Fraction:
      return "fraction";
    case FewShotRule::Absolute:
      return "absolute";
  }
  return "?";
}

}  // namespace

TaskSchema schema_from_json(const Json& j) {
  const TaskId task = parse_task(require_string(j, "task"));
  const TaskSchema defaults = default_schema(task);
  std::set<std::string> allowed = {"task", "fewshot"};
  auto labels = [&](const char* key, std::size_t stage) {
    allowed.insert(key);
    return j.contains(key) ? type_labels(j[key], key) : stage_labels(defaults, stage);
  };

  TaskSchema s;
  switch (task) {
    case TaskId::NER:
      s = ner_schema(labels("entity_types", 0));
      break;
    case TaskId::RE: {
      auto entities = labels("entity_types", 0);
      TypeLabels relations;
      allowed.insert("relations");
      if (j.contains("relations")) {
        relations = type_labels(j["relations"], "relations");
      } else {
        for (const auto& q : defaults.stages[1].queries)
          relations.emplace_back(q.tag, q.label_template.substr(std::string_view("{head} ").size()));
      }
      s = re_schema(entities, relations);
      break;
    }
    case TaskId::EE:
      s = ee_schema(labels("trigger_types", 0), labels("argument_roles", 1));
      break;
    case TaskId::SRL: {
      allowed.insert({"predicate_label", "roles"});
      auto predicate = j.contains("predicate_label") ? require_string(j, "predicate_label")
                                                     : defaults.stages[0].queries[0].label_template;
      std::vector<std::string> roles;
      if (j.contains("roles")) {
        roles = string_array(j["roles"], "roles");
      } else {
        for (const auto& q : defaults.stages[1].queries) roles.push_back(q.tag);
      }
      s = srl_schema(std::move(predicate), roles);
      break;
    }
    case TaskId::ABSA:
      s = absa_schema(labels("polarities", 0));
      break;
    case TaskId::ASTE: {
      auto polarities = labels("polarities", 0);
      allowed.insert("aspect_template");
      s = aste_schema(polarities, j.contains("aspect_template")
                                      ? require_string(j, "aspect_template")
                                      : defaults.stages[1].queries[0].label_template);
      break;
    }
  }
  for (const auto& [key, v] : j.items()) {
    if (!allowed.contains(key))
      throw DataError("unknown key '" + key + "' in " + std::string(task_name(task)) + " task config");
  }
  if (j.contains("fewshot")) {
    const auto& f = j["fewshot"];
    if (!f.is_object()) throw DataError("'fewshot' must be an object");
    for (const auto& [key, v] : f.items()) {
      if ((key == "k" || key == "count" || key == "seed") && !non_negative_integer(v))
        throw DataError("'fewshot." + key + "' must be a non-negative integer");
      try {
        if (key == "rule") s.fewshot.rule = parse_rule(v.get<std::string>());
        else if (key == "k") s.fewshot.k = v.get<std::size_t>();
        else if (key == "fraction") s.fewshot.fraction = v.get<double>();
        else if (key == "count") s.fewshot.count = v.get<std::size_t>();
        else if (key == "seed") s.fewshot.seed = v.get<std::uint64_t>();
        else throw DataError("unknown key '" + key + "' in 'fewshot'");
      } catch (const Json::exception&) {
        throw DataError("'fewshot." + key + "' has the wrong type");
      }
    }
  }
  s.validate();
  s.fewshot.validate();
  return s;
}

Json schema_to_json(const TaskSchema& s) {
  auto labels = [&](std::size_t stage, std::string_view strip = {}) {
    Json out = Json::object();
    for (const auto& q : s.stages[stage].queries) {
      auto label = q.label_template;
      if (!strip.empty() && label.starts_with(strip)) label.erase(0, strip.size());
      out[q.tag] = label;
    }
    return out;
  };
  Json j = {{"task", task_name(s.task)}};
  switch (s.task) {
    case TaskId::NER:
      j["entity_types"] = labels(0);
      break;
    case TaskId::RE:
      j["entity_types"] = labels(0);
      j["relations"] = labels(1, "{head} ");
      break;
    case TaskId::EE:
      j["trigger_types"] = labels(0);
      j["argument_roles"] = labels(1);
      break;
    case TaskId::SRL: {
      j["predicate_label"] = s.stages[0].queries[0].label_template;
      Json roles = Json::array();
      for (const auto& q : s.stages[1].queries) roles.push_back(q.tag);
      j["roles"] = std::move(roles);
      break;
    }
    case TaskId::ABSA:
      j["polarities"] = labels(0);
      break;
    case TaskId::ASTE:
      j["polarities"] = labels(0);
      j["aspect_template"] = s.stages[1].queries[0].label_template;
      break;
  }
  j["fewshot"] = {{"rule", rule_name(s.fewshot.rule)},
                  {"k", s.fewshot.k},
                  {"fraction", s.fewshot.fraction},
                  {"count", s.fewshot.count},
                  {"seed", s.fewshot.seed}};
  return j;
}

// ---- task datasets ----

namespace {

class SpanReader {
 public:
  explicit SpanReader(const std::vector<std::string>& tokens) : tokens_(tokens) {}

  // {"start","end"}, {"text"} or a bare string.
  TokenRange operator()(const Json& v) const {
    if (v.is_string()) return align(v.get<std::string>());
    if (!v.is_object()) throw DataError("span must be a string or an object");
    if (v.contains("start") || v.contains("end")) {
      const TokenRange r{require_index(v, "start"), require_index(v, "end")};
      if (r.begin >= r.end || r.end > tokens_.size())
        throw DataError("span [" + std::to_string(r.begin) + ", " + std::to_string(r.end) +
                        ") is outside the sentence of " + std::to_string(tokens_.size()) + " tokens");
      return r;
    }
    if (v.contains("text")) return align(require_string(v, "text"));
    throw DataError("span needs start/end or text");
  }

  TokenRange field(const Json& j, const char* key) const { return (*this)(require(j, key)); }

 private:
  TokenRange align(const std::string& text) const {
    const auto r = align_span(tokens_, text);
    if (!r) throw DataError("span '" + text + "' does not occur in the sentence");
    return *r;
  }
  const std::vector<std::string>& tokens_;
};

const Json& list_field(const Json& j, const char* key) {
  static const Json kEmpty = Json::array();
  const auto it = j.find(key);
  if (it == j.end()) return kEmpty;
  if (!it->is_array()) throw DataError(std::string("field '") + key + "' must be an array");
  return *it;
}

std::string string_or(const Json& j, const char* key, const char* fallback) {
  return j.contains(key) ? require_string(j, key) : std::string(fallback);
}

Json range_json(TokenRange r) { return {{"start", r.begin}, {"end", r.end}}; }

}  // namespace

TaskItem task_item_from_json(const Json& j, TaskId task, std::size_t line_number) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  TaskItem item;
  if (j.contains("id")) {
    const auto& id = j["id"];
    if (id.is_string()) item.id = id.get<std::string>();
    else if (id.is_number_integer()) item.id = std::to_string(id.get<long long>());
    else throw DataError("field 'id' must be a string or an integer");
  } else {
    item.id = "line-" + std::to_string(line_number);
  }
  if (j.contains("tokens")) {
    item.tokens = string_array(j["tokens"], "tokens");
  } else if (j.contains("text")) {
    item.tokens = tokenize(require_string(j, "text"));
  } else {
    throw DataError("item needs 'tokens' or 'text'");
  }
  if (item.tokens.empty()) throw DataError("item has no tokens");

  const SpanReader span(item.tokens);
  auto add = [&](std::string kind, std::string tag, std::vector<TokenRange> spans) {
    item.gold.push_back({item.id, std::move(kind), {std::move(tag)}, std::move(spans)});
  };
  switch (task) {
    case TaskId::NER:
    case TaskId::RE:
      for (const auto& e : list_field(j, "entities")) add("entity", require_string(e, "type"), {span(e)});
      if (task == TaskId::RE) {
        for (const auto& r : list_field(j, "relations"))
          add("relation", require_string(r, "type"), {span.field(r, "head"), span.field(r, "tail")});
      }
      break;
    case TaskId::EE:
      for (const auto& t : list_field(j, "triggers")) add("trigger", string_or(t, "type", "Trigger"), {span(t)});
      for (const auto& a : list_field(j, "arguments")) {
        add("argument", string_or(a, "role", "Argument"),
            {span.field(a, "trigger"), span.field(a, "argument")});
      }
      break;
    case TaskId::SRL:
      for (const auto& p : list_field(j, "predicates")) add("predicate", "V", {span(p)});
      for (const auto& r : list_field(j, "roles")) {
        const auto verb = span.field(r, "predicate");
        add("predicate", "V", {verb});
        add("role", require_string(r, "role"), {verb, span.field(r, "argument")});
      }
      break;
    case TaskId::ABSA:
      for (const auto& t : list_field(j, "terms")) add("term", require_string(t, "polarity"), {span(t)});
      break;
    case TaskId::ASTE:
      for (const auto& t : list_field(j, "triplets")) {
        const auto polarity = require_string(t, "polarity");
        const auto opinion = span.field(t, "opinion");
        add("opinion", polarity, {opinion});
        add("triplet", polarity, {span.field(t, "aspect"), opinion});
      }
      break;
  }
  std::sort(item.gold.begin(), item.gold.end());
  item.gold.erase(std::unique(item.gold.begin(), item.gold.end()), item.gold.end());
  return item;
}

std::vector<TaskItem> task_items_from_jsonl(std::istream& in, TaskId task) {
  std::vector<TaskItem> out;
  std::set<std::string> ids;
  for_each_json_line(in, [&](const Json& j, const std::string& line, std::size_t number) {
    auto item = task_item_from_json(j, task, number);
    if (!ids.insert(item.id).second) throw DataError("duplicate id '" + item.id + "'");
    item.raw_json = line;
    out.push_back(std::move(item));
  });
  return out;
}

std::vector<TaskItem> read_task_items(const fs::path& path, TaskId task) {
  return read_with<TaskItem>(path, [task](std::istream& in) { return task_items_from_jsonl(in, task); });
}

std::string task_items_to_jsonl(std::span<const TaskItem> items, TaskId task) {
  std::string out;
  for (const auto& item : items) {
    if (!item.raw_json.empty()) {
      out += item.raw_json + "\n";
      continue;
    }
    Json j = {{"id", item.id}, {"tokens", item.tokens}};
    auto push = [&](const char* key, Json value) {
      if (!j.contains(key)) j[key] = Json::array();
      j[key].push_back(std::move(value));
    };
    for (const auto& t : item.gold) {
      const auto& tag = t.tags.empty() ? std::string() : t.tags[0];
      if (t.kind == "entity") {
        auto e = range_json(t.spans[0]);
        e["type"] = tag;
        push("entities", std::move(e));
      } else if (t.kind == "relation") {
        push("relations", {{"type", tag}, {"head", range_json(t.spans[0])}, {"tail", range_json(t.spans[1])}});
      } else if (t.kind == "trigger") {
        auto e = range_json(t.spans[0]);
        e["type"] = tag;
        push("triggers", std::move(e));
      } else if (t.kind == "argument") {
        push("arguments", {{"role", tag}, {"trigger", range_json(t.spans[0])}, {"argument", range_json(t.spans[1])}});
      } else if (t.kind == "predicate") {
        push("predicates", range_json(t.spans[0]));
      } else if (t.kind == "role") {
        push("roles", {{"role", tag}, {"predicate", range_json(t.spans[0])}, {"argument", range_json(t.spans[1])}});
      } else if (t.kind == "term") {
        auto e = range_json(t.spans[0]);
        e["polarity"] = tag;
        push("terms", std::move(e));
      } else if (t.kind == "triplet") {
        push("triplets", {{"aspect", range_json(t.spans[0])}, {"opinion", range_json(t.spans[1])}, {"polarity", tag}});
      }
    }
    (void)task;
    out += j.dump() + "\n";
  }
  return out;
}

// ---- reports ----

Json tuple_to_json(const TaskTuple& t) {
  Json spans = Json::array();
  for (const auto& r : t.spans) spans.push_back(Json::array({r.begin, r.end}));
  return {{"sentence_id", t.sentence_id}, {"kind", t.kind}, {"tags", t.tags}, {"spans", std::move(spans)}};
}

Json diagnostics_to_json(const SynthDiagnostics& d) {
  return {{"sentences", d.sentences},
          {"failed_records", d.failed_records},
          {"retries", d.retries},
          {"matched_lines", d.matched_lines},
          {"unmatched_lines", d.unmatched_lines},
          {"pairs_parsed", d.pairs_parsed},
          {"pairs_unaligned", d.pairs_unaligned},
          {"pairs_duplicate", d.pairs_duplicate},
          {"pairs_kept", d.pairs_kept},
          {"drop_rate", d.drop_rate()},
          {"corpus_exhausted", d.corpus_exhausted}};
}

Json label_stats_to_json(const LabelStats& stats) {
  Json buckets = Json::array();
  for (const auto& b : stats.buckets) {
    Json entries = Json::array();
    for (const auto& e : b.entries) {
      entries.push_back({{"label", e.label}, {"count", e.count}, {"relative_frequency", e.relative_frequency}});
    }
    buckets.push_back({{"name", b.name}, {"total", b.total}, {"distinct", b.distinct}, {"labels", std::move(entries)}});
  }
  return {{"total", stats.total}, {"buckets", std::move(buckets)}};
}

std::string label_stats_to_text(const LabelStats& stats) {
  std::ostringstream out;
  out << "labels: " << stats.total << " occurrences\n";
  for (const auto& b : stats.buckets) {
    out << "\n" << b.name << "  (" << b.total << " occurrences, " << b.distinct << " distinct)\n";
    std::size_t width = 5;
    for (const auto& e : b.entries) width = std::max(width, e.label.size());
    for (const auto& e : b.entries) {
      out << "  " << std::left << std::setw(static_cast<int>(width)) << e.label << "  " << std::right
          << std::setw(8) << e.count << "  " << std::fixed << std::setprecision(2) << std::setw(6)
          << 100.0 * e.relative_frequency << "%\n";
    }
  }
  return out.str();
}

Json training_log_to_json(const TrainingLog& log) {
  return {{"examples", log.examples},
          {"epochs", log.epochs},
          {"batch_size", log.batch_size},
          {"batches", log.batches.size()},
          {"first_loss", log.batches.empty() ? 0.0 : log.batches.front().loss},
          {"last_loss", log.batches.empty() ? 0.0 : log.batches.back().loss}};
}

std::string training_log_to_jsonl(const TrainingLog& log) {
  std::string out;
  for (const auto& b : log.batches) {
    out += Json({{"epoch", b.epoch},
                 {"step", b.step},
                 {"size", b.size},
                 {"learning_rate", b.learning_rate},
                 {"loss", b.loss}})
               .dump() +
           "\n";
  }
  return out;
}

namespace {
Json counts_json(const Counts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
          {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}
}  // namespace

Json eval_report_to_json(const EvalReport& r) {
  Json per_label = Json::object();
  for (const auto& [label, c] : r.per_label) per_label[label] = counts_json(c);
  return {{"task", task_name(r.task)},
          {"mode", mode_name(r.mode)},
          {"sentences", r.sentences},
          {"overall", counts_json(r.overall)},
          {"per_label", std::move(per_label)}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace spandistill
