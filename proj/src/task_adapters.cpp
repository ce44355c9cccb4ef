// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/task_adapters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "spandistill/rng.hpp"
#include "spandistill/text.hpp"

namespace spandistill {
namespace {

constexpr std::array<std::pair<TaskId, std::string_view>, 6> kTaskNames = {{
    {TaskId::NER, "ner"},
    {TaskId::RE, "re"},
    {TaskId::EE, "ee"},
    {TaskId::SRL, "srl"},
    {TaskId::ABSA, "absa"},
    {TaskId::ASTE, "aste"},
}};

struct Placeholder {
  std::string role;
  std::size_t begin = 0;  // position of '{'
  std::size_t end = 0;    // one past '}'
};

// Throws on malformed braces or more than one placeholder.
std::optional<Placeholder> find_placeholder(std::string_view tmpl) {
  const auto open = tmpl.find('{');
  if (open == std::string_view::npos) {
    if (tmpl.find('}') != std::string_view::npos)
      throw std::invalid_argument("stray '}' in template '" + std::string(tmpl) + "'");
    return std::nullopt;
  }
  const auto close = tmpl.find('}', open);
  if (close == std::string_view::npos || close == open + 1)
    throw std::invalid_argument("malformed placeholder in '" + std::string(tmpl) + "'");
  if (tmpl.find('{', open + 1) != std::string_view::npos ||
      tmpl.find('}', close + 1) != std::string_view::npos)
    throw std::invalid_argument("template '" + std::string(tmpl) +
                                "' has more than one placeholder");
  return Placeholder{std::string(tmpl.substr(open + 1, close - open - 1)), open, close + 1};
}

std::string instantiate(std::string_view tmpl, const Placeholder& ph, std::string_view value) {
  std::string out(tmpl.substr(0, ph.begin));
  out += value;
  out += tmpl.substr(ph.end);
  return normalize_label(out);
}

const std::string& tuple_tag(const QuerySpec& spec, const Query& q) {
  return spec.inherit_tag && q.anchor ? q.anchor->tag : spec.tag;
}

TaskTuple make_tuple(std::string_view sentence_id, const QuerySpec& spec, const Query& q,
                     TokenRange answer) {
  TaskTuple t{std::string(sentence_id), spec.kind, {tuple_tag(spec, q)}, {}};
  if (q.anchor) {
    t.spans = spec.answer_first ? std::vector{answer, q.anchor->range}
                                : std::vector{q.anchor->range, answer};
  } else {
    t.spans = {answer};
  }
  return t;
}

FewShotSpec per_label(std::size_t k) { return {FewShotRule::PerLabelK, k, 0.05, 50, 0}; }

}  // namespace

std::string_view task_name(TaskId task) {
  for (const auto& [id, name] : kTaskNames) {
    if (id == task) return name;
  }
  return "unknown";
}

TaskId parse_task(std::string_view name) {
  const auto lower = ascii_lower(name);
  for (const auto& [id, n] : kTaskNames) {
    if (n == lower) return id;
  }
  throw std::invalid_argument("unknown task '" + std::string(name) +
                              "' (expected ner, re, ee, srl, absa or aste)");
}

void FewShotSpec::validate() const {
  switch (rule) {
    case FewShotRule::PerLabelK:
      if (k == 0) throw std::invalid_argument("few-shot k must be positive");
      break;
    case FewShotRule::Fraction:
      if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("few-shot fraction must lie in (0, 1]");
      break;
    case FewShotRule::Absolute:
      if (count == 0) throw std::invalid_argument("few-shot count must be positive");
      break;
  }
}

void TaskSchema::validate() const {
  if (stages.empty()) throw std::invalid_argument("schema has no stages");
  std::map<std::string, std::size_t> role_stage;
  std::map<std::string, std::size_t> kind_stage;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& stage = stages[s];
    if (stage.role.empty()) throw std::invalid_argument("stage " + std::to_string(s) + " has no role");
    if (role_stage.contains(stage.role))
      throw std::invalid_argument("duplicate stage role '" + stage.role + "'");
    if (stage.queries.empty())
      throw std::invalid_argument("stage '" + stage.role + "' has no queries");
    std::set<std::string> templates;
    for (const auto& q : stage.queries) {
      if (normalize_label(q.label_template).empty())
        throw std::invalid_argument("empty label template in stage '" + stage.role + "'");
      if (q.kind.empty()) throw std::invalid_argument("query '" + q.label_template + "' has no kind");
      if (!templates.insert(normalize_label(q.label_template)).second)
        throw std::invalid_argument("stage '" + stage.role + "' repeats label '" +
                                    q.label_template + "'");
      const auto ph = find_placeholder(q.label_template);
      if (ph && !role_stage.contains(ph->role))
        throw std::invalid_argument("placeholder {" + ph->role + "} in '" + q.label_template +
                                    "' does not name an earlier stage");
      if (!ph && (q.inherit_tag || q.answer_first || !q.anchor_tags.empty()))
        throw std::invalid_argument("query '" + q.label_template +
                                    "' sets anchor options without a placeholder");
      if (!q.inherit_tag && q.tag.empty())
        throw std::invalid_argument("query '" + q.label_template + "' has no tag");
      const auto [it, inserted] = kind_stage.emplace(q.kind, s);
      if (!inserted && it->second != s)
        throw std::invalid_argument("kind '" + q.kind + "' is produced by two stages");
    }
    role_stage.emplace(stage.role, s);
  }
  for (const auto& k : evaluated_kinds) {
    if (!kind_stage.contains(k))
      throw std::invalid_argument("evaluated kind '" + k + "' is never produced");
  }
  fewshot.validate();
}

namespace {
QuerySpec query_spec(std::string label, std::string kind, std::string tag) {
  QuerySpec q;
  q.label_template = std::move(label);
  q.kind = std::move(kind);
  q.tag = std::move(tag);
  return q;
}
}  // namespace

TaskSchema ner_schema(const TypeLabels& entity_types) {
  TaskSchema s{TaskId::NER, {{"entity", {}}}, {"entity"}, "entity", per_label(5)};
  for (const auto& [tag, label] : entity_types) s.stages[0].queries.push_back(query_spec(label, "entity", tag));
  s.validate();
  return s;
}

TaskSchema re_schema(const TypeLabels& entity_types, const TypeLabels& relations) {
  TaskSchema s{TaskId::RE, {{"head", {}}, {"tail", {}}}, {"entity", "relation"}, "relation",
               per_label(5)};
  for (const auto& [tag, label] : entity_types) s.stages[0].queries.push_back(query_spec(label, "entity", tag));
  for (const auto& [tag, verbalization] : relations) {
    s.stages[1].queries.push_back(query_spec("{head} " + verbalization, "relation", tag));
  }
  s.validate();
  return s;
}

TaskSchema ee_schema(const TypeLabels& trigger_types, const TypeLabels& argument_roles) {
  TaskSchema s{TaskId::EE, {{"trigger", {}}, {"argument", {}}}, {"trigger", "argument"}, "trigger",
               {FewShotRule::Fraction, 5, 0.05, 50, 0}};
  for (const auto& [tag, label] : trigger_types) s.stages[0].queries.push_back(query_spec(label, "trigger", tag));
  for (const auto& [tag, tmpl] : argument_roles) s.stages[1].queries.push_back(query_spec(tmpl, "argument", tag));
  s.validate();
  return s;
}

TaskSchema srl_schema(std::string predicate_label, const std::vector<std::string>& roles) {
  TaskSchema s{TaskId::SRL, {{"verb", {}}, {"argument", {}}}, {"role"}, "role",
               {FewShotRule::Absolute, 5, 0.05, 50, 0}};
  s.stages[0].queries.push_back(query_spec(std::move(predicate_label), "predicate", "V"));
  for (const auto& role : roles) {
    s.stages[1].queries.push_back(query_spec(role + " Argument for Verb '{verb}'", "role", role));
  }
  s.validate();
  return s;
}

TaskSchema absa_schema(const TypeLabels& polarity_labels) {
  TaskSchema s{TaskId::ABSA, {{"term", {}}}, {"term"}, "term", per_label(5)};
  for (const auto& [tag, label] : polarity_labels) s.stages[0].queries.push_back(query_spec(label, "term", tag));
  s.validate();
  return s;
}

TaskSchema aste_schema(const TypeLabels& polarity_labels, std::string aspect_template) {
  TaskSchema s{TaskId::ASTE, {{"opinion", {}}, {"aspect", {}}}, {"triplet"}, "triplet",
               per_label(5)};
  for (const auto& [tag, label] : polarity_labels) s.stages[0].queries.push_back(query_spec(label, "opinion", tag));
  s.stages[1].queries.push_back({std::move(aspect_template), "triplet", "", true, true, {}});
  s.validate();
  return s;
}

TaskSchema default_schema(TaskId task) {
  const TypeLabels entities = {
      {"Person", "Person"}, {"Location", "Location"}, {"Organization", "Organization"}};
  switch (task) {
    case TaskId::NER:
      return ner_schema(entities);
    case TaskId::RE:
      return re_schema(entities, {{"Born_In", "births in"},
                                  {"Live_In", "lives in"},
                                  {"Work_For", "works for"},
                                  {"Located_In", "located in"},
                                  {"OrgBased_In", "based in"}});
    case TaskId::EE:
      return ee_schema({{"Trigger", "Trigger"}}, {{"Argument", "Argument for Trigger '{trigger}'"}});
    case TaskId::SRL:
      return srl_schema("Verb", {"A0", "A1", "A2", "A3", "A4", "AM-TMP", "AM-LOC", "AM-MNR",
                                 "AM-ADV", "AM-DIS", "AM-NEG", "AM-MOD"});
    case TaskId::ABSA:
      return absa_schema({{"positive", "Positive Term"},
                          {"negative", "Negative Term"},
                          {"neutral", "Neutral Term"}});
    case TaskId::ASTE:
      return aste_schema({{"positive", "Positive Opinion"},
                          {"negative", "Negative Opinion"},
                          {"neutral", "Neutral Opinion"}},
                         "Aspect for Opinion '{opinion}'");
  }
  throw std::invalid_argument("unknown task");
}

std::vector<Query> build_queries(const TaskSchema& schema, std::size_t stage_index,
                                 const Bindings& prior) {
  if (stage_index >= schema.stages.size())
    throw std::invalid_argument("build_queries: stage " + std::to_string(stage_index) +
                                " out of range");
  std::vector<Query> out;
  const auto& stage = schema.stages[stage_index];
  for (std::size_t qi = 0; qi < stage.queries.size(); ++qi) {
    const auto& spec = stage.queries[qi];
    const auto ph = find_placeholder(spec.label_template);
    if (!ph) {
      out.push_back({normalize_label(spec.label_template), qi, std::nullopt});
      continue;
    }
    const auto it = prior.find(ph->role);
    if (it == prior.end())
      throw std::invalid_argument("unresolved placeholder {" + ph->role + "} in '" +
                                  spec.label_template + "'");
    for (const auto& b : it->second) {
      if (!spec.anchor_tags.empty() &&
          std::find(spec.anchor_tags.begin(), spec.anchor_tags.end(), b.tag) ==
              spec.anchor_tags.end())
        continue;
      out.push_back({instantiate(spec.label_template, *ph, b.text), qi, b});
    }
  }
  return out;
}

std::vector<TaskTuple> assemble(const TaskSchema& schema, std::string_view sentence_id,
                                std::span<const StageOutput> stage_outputs) {
  if (stage_outputs.size() > schema.stages.size())
    throw std::invalid_argument("assemble: more stage outputs than stages");
  std::vector<TaskTuple> tuples;
  for (std::size_t s = 0; s < stage_outputs.size(); ++s) {
    for (const auto& answer : stage_outputs[s]) {
      const auto& spec = schema.stages[s].queries.at(answer.query.spec_index);
      for (const auto& span : answer.spans) {
        tuples.push_back(make_tuple(sentence_id, spec, answer.query, span));
      }
    }
  }
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  return tuples;
}

std::vector<Binding> stage_bindings(const TaskSchema& schema, std::size_t stage_index,
                                    const StageOutput& output,
                                    std::span<const std::string> tokens) {
  const auto& stage = schema.stages.at(stage_index);
  std::vector<Binding> out;
  for (const auto& answer : output) {
    const auto& spec = stage.queries.at(answer.query.spec_index);
    for (const auto& r : answer.spans) {
      if (r.end > tokens.size()) throw std::invalid_argument("binding span outside sentence");
      out.push_back({stage.role, r, detokenize(tokens.subspan(r.begin, r.size())),
                     tuple_tag(spec, answer.query)});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<StageOutput> gold_stage_outputs(const TaskSchema& schema, const TaskItem& item) {
  std::vector<StageOutput> outputs;
  Bindings bindings;
  for (std::size_t s = 0; s < schema.stages.size(); ++s) {
    StageOutput output;
    for (auto& q : build_queries(schema, s, bindings)) {
      const auto& spec = schema.stages[s].queries[q.spec_index];
      const auto& tag = tuple_tag(spec, q);
      std::vector<TokenRange> spans;
      for (const auto& t : item.gold) {
        if (t.kind != spec.kind || t.tags.size() != 1 || t.tags[0] != tag) continue;
        if (q.anchor) {
          if (t.spans.size() != 2) continue;
          const auto& anchor = spec.answer_first ? t.spans[1] : t.spans[0];
          if (anchor == q.anchor->range) spans.push_back(spec.answer_first ? t.spans[0] : t.spans[1]);
        } else if (t.spans.size() == 1) {
          spans.push_back(t.spans[0]);
        }
      }
      std::sort(spans.begin(), spans.end());
      spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
      output.push_back({std::move(q), std::move(spans)});
    }
    bindings[schema.stages[s].role] = stage_bindings(schema, s, output, item.tokens);
    outputs.push_back(std::move(output));
  }
  return outputs;
}

std::vector<TaggedExample> to_training_examples(const TaskSchema& schema,
                                                std::span<const TaskItem> items,
                                                ExampleDiagnostics* diagnostics) {
  ExampleDiagnostics local;
  std::vector<TaggedExample> out;
  for (const auto& item : items) {
    std::vector<TaggedExample> item_examples;
    std::string problem;
    for (const auto& t : item.gold) {
      for (const auto& r : t.spans) {
        if (r.empty() || r.end > item.tokens.size()) problem = "gold span outside sentence";
      }
    }
    if (problem.empty()) {
      try {
        const auto outputs = gold_stage_outputs(schema, item);
        const auto expressible = assemble(schema, item.id, outputs);
        std::size_t missing = 0;
        for (const auto& g : item.gold) {
          auto copy = g;
          copy.sentence_id = item.id;
          if (!std::binary_search(expressible.begin(), expressible.end(), copy)) ++missing;
        }
        if (missing > 0) {
          local.messages.push_back(item.id + ": " + std::to_string(missing) +
                                   " gold tuple(s) have no query in the schema");
        }
        for (const auto& stage : outputs) {
          std::vector<std::string> order;
          std::map<std::string, std::vector<TokenRange>> by_label;
          for (const auto& answer : stage) {
            if (!by_label.contains(answer.query.label)) order.push_back(answer.query.label);
            auto& spans = by_label[answer.query.label];
            spans.insert(spans.end(), answer.spans.begin(), answer.spans.end());
          }
          for (const auto& label : order) {
            auto& spans = by_label[label];
            std::sort(spans.begin(), spans.end());
            spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
            item_examples.push_back(align_tags(encode_query(label, item.tokens), spans));
          }
        }
      } catch (const std::invalid_argument& e) {
        problem = e.what();
      }
    }
    if (!problem.empty()) {
      ++local.skipped;
      local.messages.push_back(item.id + ": skipped (" + problem + ")");
      continue;
    }
    ++local.items;
    for (auto& ex : item_examples) {
      if (std::all_of(ex.tags.begin(), ex.tags.end(), [](Tag t) { return t == Tag::O; }))
        ++local.negatives;
      out.push_back(std::move(ex));
    }
  }
  local.examples = out.size();
  if (diagnostics) *diagnostics = std::move(local);
  return out;
}

FewShotResult fewshot_sample(std::span<const TaskItem> dataset, const FewShotSpec& spec,
                             std::string_view label_kind) {
  spec.validate();
  if (dataset.empty()) throw std::invalid_argument("fewshot_sample: empty dataset");
  FewShotResult result;
  Rng rng(spec.seed);
  const std::size_t n = dataset.size();

  switch (spec.rule) {
    case FewShotRule::PerLabelK: {
      std::map<std::string, std::vector<std::size_t>> by_label;
      for (std::size_t i = 0; i < n; ++i) {
        std::set<std::string> labels;
        for (const auto& t : dataset[i].gold) {
          if (t.kind == label_kind) labels.insert(t.tags.empty() ? t.kind : t.tags[0]);
        }
        for (const auto& l : labels) by_label[l].push_back(i);
      }
      if (by_label.empty()) {
        result.warnings.push_back("no '" + std::string(label_kind) + "' tuples in the dataset");
      }
      std::set<std::size_t> chosen;
      for (const auto& [label, candidates] : by_label) {
        if (candidates.size() < spec.k) {
          result.warnings.push_back("label '" + label + "' has only " +
                                    std::to_string(candidates.size()) + " candidate(s) for " +
                                    std::to_string(spec.k) + "-shot; taking all");
        }
        const auto take = std::min(spec.k, candidates.size());
        for (const auto j : rng.sample_indices(candidates.size(), take)) chosen.insert(candidates[j]);
      }
      result.indices.assign(chosen.begin(), chosen.end());
      break;
    }
    case FewShotRule::Fraction: {
      // The epsilon keeps exact products such as 0.05 * 200 from rounding up.
      const auto m = static_cast<std::size_t>(std::ceil(spec.fraction * static_cast<double>(n) - 1e-9));
      result.indices = rng.sample_indices(n, std::clamp<std::size_t>(m, 1, n));
      break;
    }
    case FewShotRule::Absolute: {
      if (spec.count > n) {
        result.warnings.push_back("requested " + std::to_string(spec.count) + " examples but only " +
                                  std::to_string(n) + " exist; taking all");
      }
      result.indices = rng.sample_indices(n, std::min(spec.count, n));
      break;
    }
  }
  return result;
}

TaskPrediction predict_task(const TaskSchema& schema, std::string_view sentence_id,
                            std::span<const std::string> tokens, const Tagger& tagger) {
  TaskPrediction prediction;
  Bindings bindings;
  std::map<std::string, TagDistribution> cache;
  auto distribution = [&](const std::string& label) -> const TagDistribution& {
    auto it = cache.find(label);
    if (it == cache.end()) {
      auto dist = tagger.predict(encode_query(label, tokens));
      if (dist.size() != tokens.size()) {
        throw std::runtime_error("tagger returned " + std::to_string(dist.size()) +
                                 " distributions for " + std::to_string(tokens.size()) + " tokens");
      }
      it = cache.emplace(label, std::move(dist)).first;
    }
    return it->second;
  };

  for (std::size_t s = 0; s < schema.stages.size(); ++s) {
    auto queries = build_queries(schema, s, bindings);
    std::map<std::optional<Binding>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < queries.size(); ++i) groups[queries[i].anchor].push_back(i);

    StageOutput output(queries.size());
    for (const auto& [anchor, members] : groups) {
      std::vector<ScoredSpan> candidates;
      for (const auto i : members) {
        for (auto& c : decode_with_probs(distribution(queries[i].label), queries[i].label))
          candidates.push_back(std::move(c));
      }
      const auto kept = resolve_conflicts(std::move(candidates));
      for (const auto i : members) {
        output[i].query = queries[i];
        for (const auto& k : kept) {
          if (k.label == queries[i].label) output[i].spans.push_back(k.range);
        }
      }
    }
    bindings[schema.stages[s].role] = stage_bindings(schema, s, output, tokens);
    prediction.stages.push_back(std::move(output));
  }
  prediction.tuples = assemble(schema, sentence_id, prediction.stages);
  return prediction;
}

OracleTagger::OracleTagger(std::span<const TaggedExample> examples) {
  for (const auto& ex : examples) {
    if (ex.tags.size() != ex.body_tokens.size())
      throw std::invalid_argument("OracleTagger: untagged example '" + ex.label + "'");
    answers_[{ex.label, join(ex.body_tokens, " ")}] = ex.tags;
  }
}

TagDistribution OracleTagger::predict(const TaggedExample& query) const {
  const auto it = answers_.find({query.label, join(query.body_tokens, " ")});
  if (it == answers_.end()) {
    const std::vector<Tag> none(query.body_tokens.size(), Tag::O);
    return one_hot(none);
  }
  return one_hot(it->second);
}

void OracleTagger::begin_training(const TrainConfig&, std::size_t) {
  throw std::logic_error("the oracle tagger cannot be trained");
}

double OracleTagger::train_batch(std::span<const TaggedExample* const>, double) {
  throw std::logic_error("the oracle tagger cannot be trained");
}

}  // namespace spandistill
