// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spandistill/label_span_codec.hpp"
#include "spandistill/model_harness.hpp"
#include "spandistill/token_range.hpp"

namespace spandistill {

enum class TaskId { NER, RE, EE, SRL, ABSA, ASTE };

std::string_view task_name(TaskId task);
/// Case-insensitive. Throws std::invalid_argument for unknown names.
TaskId parse_task(std::string_view name);

/// A structured task result.
///
/// Tuples of every task share one shape: a kind ("entity", "relation",
/// "trigger", "argument", "predicate", "role", "term", "opinion", "triplet"),
/// type tags (entity type, relation, role, polarity) and member spans. Two
/// tuples match when all four fields are equal.
struct TaskTuple {
  std::string sentence_id;
  std::string kind;
  std::vector<std::string> tags;
  std::vector<TokenRange> spans;

  auto operator<=>(const TaskTuple&) const = default;
};

/// One query family inside a stage.
///
/// `label_template` is either a static label ("Person") or contains exactly
/// one "{role}" placeholder naming an earlier stage ("{head} births in").
/// Answers become tuples of `kind`. Anchored tuples carry two spans,
/// [anchor, answer] or [answer, anchor] when `answer_first`.
struct QuerySpec {
  std::string label_template;
  std::string kind;
  std::string tag;
  bool inherit_tag = false;              // use the anchor's tag instead of `tag`
  bool answer_first = false;
  std::vector<std::string> anchor_tags;  // bind only anchors with these tags; empty = all
};

struct StageSpec {
  std::string role;  // name later stages use to reference this stage's spans
  std::vector<QuerySpec> queries;
};

enum class FewShotRule { PerLabelK, Fraction, Absolute };

struct FewShotSpec {
  FewShotRule rule = FewShotRule::PerLabelK;
  std::size_t k = 5;
  double fraction = 0.05;
  std::size_t count = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TaskSchema {
  TaskId task = TaskId::NER;
  std::vector<StageSpec> stages;
  std::vector<std::string> evaluated_kinds;  // scored in "full" evaluation mode
  std::string fewshot_kind;                  // tuple kind whose tags define few-shot classes
  FewShotSpec fewshot;                       // default sampling protocol for the task

  /// Throws std::invalid_argument when a placeholder names no earlier stage,
  /// a template has more than one placeholder, a kind is produced by two
  /// stages or a stage repeats a label template.
  void validate() const;
};

using TypeLabels = std::vector<std::pair<std::string, std::string>>;  // (tag, query label)

TaskSchema ner_schema(const TypeLabels& entity_types);
/// `relations` maps relation tag to its verbalization, queried as "<head> <verbalization>".
TaskSchema re_schema(const TypeLabels& entity_types, const TypeLabels& relations);
/// `argument_roles` maps role tag to a template over "{trigger}".
TaskSchema ee_schema(const TypeLabels& trigger_types, const TypeLabels& argument_roles);
/// Arguments are queried as "<role> Argument for Verb '<verb>'".
TaskSchema srl_schema(std::string predicate_label, const std::vector<std::string>& roles);
TaskSchema absa_schema(const TypeLabels& polarity_labels);
TaskSchema aste_schema(const TypeLabels& polarity_labels, std::string aspect_template);

/// Schema with the toolkit's default label verbalizations for the task.
TaskSchema default_schema(TaskId task);

struct Binding {
  std::string role;
  TokenRange range;
  std::string text;
  std::string tag;

  auto operator<=>(const Binding&) const = default;
};

/// Spans produced so far, keyed by stage role.
using Bindings = std::map<std::string, std::vector<Binding>>;

struct Query {
  std::string label;
  std::size_t spec_index = 0;
  std::optional<Binding> anchor;
};

/// Instantiates every query of a stage: one per static label and one per
/// (template, binding) for anchored templates. Throws std::invalid_argument
/// when the stage index is out of range or a referenced role is absent from
/// `prior`.
std::vector<Query> build_queries(const TaskSchema& schema, std::size_t stage_index,
                                 const Bindings& prior);

struct QueryAnswer {
  Query query;
  std::vector<TokenRange> spans;
};
using StageOutput = std::vector<QueryAnswer>;

/// Tuples from stage answers; sorted and without duplicates.
std::vector<TaskTuple> assemble(const TaskSchema& schema, std::string_view sentence_id,
                                std::span<const StageOutput> stage_outputs);

/// Bindings a stage's answers offer to later stages.
std::vector<Binding> stage_bindings(const TaskSchema& schema, std::size_t stage_index,
                                    const StageOutput& output,
                                    std::span<const std::string> tokens);

/// One sentence of a task dataset with its gold tuples.
struct TaskItem {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<TaskTuple> gold;
  std::string raw_json;  // source line, kept so subsets can be written back verbatim
};

/// The stage answers an exact tagger would give for the item's gold tuples.
std::vector<StageOutput> gold_stage_outputs(const TaskSchema& schema, const TaskItem& item);

struct ExampleDiagnostics {
  std::size_t items = 0;  // items that produced examples
  std::size_t examples = 0;
  std::size_t negatives = 0;
  std::size_t skipped = 0;
  std::vector<std::string> messages;
};

/// Tagged examples for every query the schema issues on each item, with
/// later-stage queries instantiated from gold earlier-stage spans. Queries
/// without gold answers become all-O examples. Items whose gold spans cannot
/// be encoded (out of range, overlapping under one query) are skipped.
std::vector<TaggedExample> to_training_examples(const TaskSchema& schema,
                                                std::span<const TaskItem> items,
                                                ExampleDiagnostics* diagnostics = nullptr);

struct FewShotResult {
  std::vector<std::size_t> indices;  // ascending, into the dataset
  std::vector<std::string> warnings;
};

/// Few-shot subset. PerLabelK samples k items per class (classes are the tags
/// of `label_kind` tuples) and unions them; Fraction samples ceil(p * N);
/// Absolute samples m. Deterministic per seed.
FewShotResult fewshot_sample(std::span<const TaskItem> dataset, const FewShotSpec& spec,
                             std::string_view label_kind);
inline FewShotResult fewshot_sample(std::span<const TaskItem> dataset, const TaskSchema& schema,
                                    const FewShotSpec& spec) {
  return fewshot_sample(dataset, spec, schema.fewshot_kind);
}

struct TaskPrediction {
  std::vector<TaskTuple> tuples;
  std::vector<StageOutput> stages;
};

/// Runs the stages in order. Each distinct query label is tagged once;
/// candidate spans of queries sharing an anchor compete in
/// resolve_conflicts, so every stage's answers for one anchor are disjoint.
TaskPrediction predict_task(const TaskSchema& schema, std::string_view sentence_id,
                            std::span<const std::string> tokens, const Tagger& tagger);

/// Replays fixed tags: returns a one-hot distribution for every
/// (label, body) it was built with and all-O for anything else.
class OracleTagger final : public Tagger {
 public:
  explicit OracleTagger(std::span<const TaggedExample> examples);

  TagDistribution predict(const TaggedExample& query) const override;
  void begin_training(const TrainConfig&, std::size_t) override;
  double train_batch(std::span<const TaggedExample* const>, double) override;
  std::string kind() const override { return "oracle"; }
  std::unique_ptr<Tagger> clone() const override { return std::make_unique<OracleTagger>(*this); }

 private:
  std::map<std::pair<std::string, std::string>, std::vector<Tag>> answers_;
};

}  // namespace spandistill
