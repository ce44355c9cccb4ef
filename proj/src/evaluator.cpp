// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spandistill/text.hpp"

namespace spandistill {
namespace {

constexpr std::pair<EvalMode, std::string_view> kModes[] = {
    {EvalMode::Full, "full"},
    {EvalMode::ReEntity, "re-entity"},
    {EvalMode::ReRelation, "re-relation"},
    {EvalMode::EeTriggerUnlabeled, "ee-trigger-unlabeled"},
    {EvalMode::EeArgumentUnlabeled, "ee-argument-unlabeled"},
};

std::string label_key(const TaskTuple& t) {
  if (t.tags.empty()) return t.kind;
  return t.kind + ":" + join(t.tags, "|");
}

void require_task(const TaskSchema& schema, TaskId task, EvalMode mode) {
  if (schema.task != task) {
    throw std::invalid_argument("evaluation mode '" + std::string(mode_name(mode)) +
                                "' does not apply to task " +
                                std::string(task_name(schema.task)));
  }
}

std::vector<TaskTuple> keep_kind(std::span<const TaskTuple> tuples, std::string_view kind,
                                 bool drop_tags) {
  std::vector<TaskTuple> out;
  for (const auto& t : tuples) {
    if (t.kind != kind) continue;
    out.push_back(t);
    if (drop_tags) out.back().tags.clear();
  }
  return out;
}

}  // namespace

std::string_view mode_name(EvalMode mode) {
  for (const auto& [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "unknown";
}

EvalMode parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModes) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown evaluation mode '" + std::string(name) + "'");
}

void Counts::finalize() {
  precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

std::vector<TaskTuple> project(const TaskSchema& schema, std::span<const TaskTuple> tuples,
                               EvalMode mode) {
  switch (mode) {
    case EvalMode::Full: {
      std::vector<TaskTuple> out;
      for (const auto& t : tuples) {
        if (std::find(schema.evaluated_kinds.begin(), schema.evaluated_kinds.end(), t.kind) !=
            schema.evaluated_kinds.end())
          out.push_back(t);
      }
      return out;
    }
    case EvalMode::ReEntity: {
      require_task(schema, TaskId::RE, mode);
      auto out = keep_kind(tuples, "entity", false);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case EvalMode::ReRelation:
      require_task(schema, TaskId::RE, mode);
      return keep_kind(tuples, "relation", false);
    case EvalMode::EeTriggerUnlabeled:
      require_task(schema, TaskId::EE, mode);
      return keep_kind(tuples, "trigger", true);
    case EvalMode::EeArgumentUnlabeled:
      require_task(schema, TaskId::EE, mode);
      return keep_kind(tuples, "argument", true);
  }
  throw std::invalid_argument("unknown evaluation mode");
}

EvalReport micro_f1(const TaskSchema& schema, std::span<const TaskTuple> preds,
                    std::span<const TaskTuple> golds, EvalMode mode) {
  std::map<TaskTuple, std::pair<std::size_t, std::size_t>> counts;  // (pred, gold)
  for (const auto& t : project(schema, preds, mode)) ++counts[t].first;
  for (const auto& t : project(schema, golds, mode)) ++counts[t].second;

  EvalReport report;
  report.mode = mode;
  report.task = schema.task;
  for (const auto& [tuple, pg] : counts) {
    const auto [p, g] = pg;
    const auto matched = std::min(p, g);
    auto& label = report.per_label[label_key(tuple)];
    label.tp += matched;
    label.fp += p - matched;
    label.fn += g - matched;
    report.overall.tp += matched;
    report.overall.fp += p - matched;
    report.overall.fn += g - matched;
  }
  for (auto& [_, c] : report.per_label) c.finalize();
  report.overall.finalize();
  return report;
}

EvalReport evaluate_run(const TaskSchema& schema, const Tagger& tagger,
                        std::span<const TaskItem> test_items, EvalMode mode,
                        std::size_t parallelism) {
  project(schema, {}, mode);  // rejects a mode/task mismatch before any work

  std::vector<std::vector<TaskTuple>> predictions(test_items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < test_items.size(); i = next++) {
      try {
        const auto& item = test_items[i];
        predictions[i] = predict_task(schema, item.id, item.tokens, tagger).tuples;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = test_items.size();
      }
    }
  };
  const auto threads = std::max<std::size_t>(1, std::min(parallelism, test_items.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TaskTuple> preds, golds;
  for (std::size_t i = 0; i < test_items.size(); ++i) {
    preds.insert(preds.end(), predictions[i].begin(), predictions[i].end());
    for (auto g : test_items[i].gold) {
      g.sentence_id = test_items[i].id;
      golds.push_back(std::move(g));
    }
  }
  auto report = micro_f1(schema, preds, golds, mode);
  report.sentences = test_items.size();
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  std::size_t width = 7;
  for (const auto& [label, _] : per_label) width = std::max(width, label.size());
  char line[512];
  out << "task: " << task_name(task) << "  mode: " << mode_name(mode)
      << "  sentences: " << sentences << "\n";
  std::snprintf(line, sizeof line, "%-*s %8s %8s %8s %10s %10s %10s\n", static_cast<int>(width),
                "label", "tp", "fp", "fn", "precision", "recall", "f1");
  out << line;
  auto row = [&](const std::string& label, const Counts& c) {
    std::snprintf(line, sizeof line, "%-*s %8zu %8zu %8zu %10.4f %10.4f %10.4f\n",
                  static_cast<int>(width), label.c_str(), c.tp, c.fp, c.fn, c.precision,
                  c.recall, c.f1);
    out << line;
  };
  for (const auto& [label, c] : per_label) row(label, c);
  row("overall", overall);
  return out.str();
}

namespace {
std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (const char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

std::string EvalReport::to_csv(std::string_view run_name) const {
  std::ostringstream out;
  out << "run,task,mode,label,tp,fp,fn,precision,recall,f1\n";
  char numbers[256];
  auto row = [&](const std::string& label, const Counts& c) {
    std::snprintf(numbers, sizeof numbers, "%zu,%zu,%zu,%.6f,%.6f,%.6f\n", c.tp, c.fp, c.fn,
                  c.precision, c.recall, c.f1);
    out << csv_field(run_name) << ',' << task_name(task) << ',' << mode_name(mode) << ','
        << csv_field(label) << ',' << numbers;
  };
  for (const auto& [label, c] : per_label) row(label, c);
  row("overall", overall);
  return out.str();
}

}  // namespace spandistill
