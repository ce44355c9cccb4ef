// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spandistill/llm_client.hpp"
#include "spandistill/task_adapters.hpp"

namespace spandistill {

// Offline stand-ins for the teacher LLM and for real corpora, used by the
// test suites and by `synth --mock`.

/// Deterministic rule-based annotator that answers the extraction prompt.
///
/// It recovers the sentence from the prompt's "Sentence: " line and reports
/// gazetteer hits (people, places, organizations, dates, events, topics,
/// counts of people) plus runs of capitalized words it does not know. Label
/// wording varies between synonyms ("Location", "City", "Place") by a hash of
/// the sentence and span, and same-label spans share one comma-joined line.
/// Now and then it adds a chatty preamble or a span that is not in the
/// sentence, as real models do. Makes no network calls.
class RuleBasedMockClient final : public LlmClient {
 public:
  std::string complete(const std::string& prompt) override;
  std::string name() const override { return "mock:rule-based"; }

  /// Responses for a bare sentence, without prompt wrapping.
  static std::string annotate(std::string_view sentence);
};

/// Paragraphs of two sentences each, built from news-style templates over
/// the mock's gazetteer.
std::vector<std::string> synthetic_corpus(std::size_t paragraphs, std::uint64_t seed);

/// NER items (Person, Location, Organization) from a template family that
/// the synthetic corpus never uses. Gold tuples carry exact token ranges.
std::vector<TaskItem> synthetic_ner_items(std::size_t n, std::uint64_t seed,
                                          std::string_view id_prefix = "ner");

}  // namespace spandistill
