// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spandistill/distill_synth.hpp"
#include "spandistill/evaluator.hpp"
#include "spandistill/model_harness.hpp"
#include "spandistill/task_adapters.hpp"

namespace spandistill {

using Json = nlohmann::ordered_json;

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Whole file as bytes. Throws DataError if it cannot be read.
std::string read_file(const std::filesystem::path& path);

// Distillation records, one JSON object per line:
// {"id","text","tokens","pairs":[{"label","span","start","end"}],"raw_response"[,"error"][,"origin"]}
Json record_to_json(const DistillRecord& record);
DistillRecord record_from_json(const Json& j);
std::string records_to_jsonl(std::span<const DistillRecord> records);
/// Throws DataError naming the first malformed line.
std::vector<DistillRecord> records_from_jsonl(std::istream& in);
std::vector<DistillRecord> read_records(const std::filesystem::path& path);

// Tagged examples: {"label","tokens","tags":["B","I","O",...]}
Json example_to_json(const TaggedExample& example);
TaggedExample example_from_json(const Json& j);
std::string examples_to_jsonl(std::span<const TaggedExample> examples);
std::vector<TaggedExample> examples_from_jsonl(std::istream& in);
std::vector<TaggedExample> read_examples(const std::filesystem::path& path);

/// Unknown keys are rejected so typos do not silently fall back to defaults.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});
Json train_config_to_json(const TrainConfig& config);

/// Task configuration: {"task": "re", "entity_types": {...}, "relations": {...}, ...}.
/// Keys absent from the file take the task's default verbalizations.
TaskSchema schema_from_json(const Json& j);
Json schema_to_json(const TaskSchema& schema);

/// Task datasets, one sentence per line with "tokens" (or "text") and the
/// task's gold fields. Spans are {"start","end"} token offsets, {"text"} or a
/// bare string aligned against the tokens. Throws DataError naming the line.
TaskItem task_item_from_json(const Json& j, TaskId task, std::size_t line_number);
std::vector<TaskItem> task_items_from_jsonl(std::istream& in, TaskId task);
std::vector<TaskItem> read_task_items(const std::filesystem::path& path, TaskId task);
/// The items' source lines, or a normalized rendering for generated items.
std::string task_items_to_jsonl(std::span<const TaskItem> items, TaskId task);

Json tuple_to_json(const TaskTuple& tuple);
Json diagnostics_to_json(const SynthDiagnostics& d);
Json label_stats_to_json(const LabelStats& stats);
std::string label_stats_to_text(const LabelStats& stats);
Json training_log_to_json(const TrainingLog& log);
/// One JSON line per batch.
std::string training_log_to_jsonl(const TrainingLog& log);
Json eval_report_to_json(const EvalReport& report);

/// Current UTC time as ISO-8601 with a trailing Z.
std::string utc_timestamp();

}  // namespace spandistill
