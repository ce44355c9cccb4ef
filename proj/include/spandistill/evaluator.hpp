// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spandistill/task_adapters.hpp"

namespace spandistill {

enum class EvalMode {
  Full,                 // the schema's evaluated kinds, labels included
  ReEntity,             // RE: entities, each unique entity counted once
  ReRelation,           // RE: (head, relation, tail) triples
  EeTriggerUnlabeled,   // EE: trigger spans, event type dropped
  EeArgumentUnlabeled,  // EE: (trigger, argument) pairs, role dropped
};

std::string_view mode_name(EvalMode mode);
/// Accepts "full", "re-entity", "re-relation", "ee-trigger-unlabeled",
/// "ee-argument-unlabeled".
EvalMode parse_mode(std::string_view name);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Recomputes the ratios from the counts, with 0/0 taken as 0.
  void finalize();
};

struct EvalReport {
  EvalMode mode = EvalMode::Full;
  TaskId task = TaskId::NER;
  std::size_t sentences = 0;
  Counts overall;
  std::map<std::string, Counts> per_label;  // keyed by "<kind>" or "<kind>:<tag>"

  std::string to_table() const;
  std::string to_csv(std::string_view run_name) const;
};

/// Tuples that `mode` scores, projected to their scored form.
std::vector<TaskTuple> project(const TaskSchema& schema, std::span<const TaskTuple> tuples,
                               EvalMode mode);

/// Exact-match micro precision/recall/F1 over multisets of projected tuples.
/// Throws std::invalid_argument when the mode belongs to another task.
EvalReport micro_f1(const TaskSchema& schema, std::span<const TaskTuple> preds,
                    std::span<const TaskTuple> golds, EvalMode mode);

/// Predicts every item with `tagger` and scores against the gold tuples.
/// Sentences are predicted on up to `parallelism` threads; the report does
/// not depend on the thread count.
EvalReport evaluate_run(const TaskSchema& schema, const Tagger& tagger,
                        std::span<const TaskItem> test_items, EvalMode mode,
                        std::size_t parallelism = 1);

}  // namespace spandistill
