// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spandistill/llm_client.hpp"
#include "spandistill/token_range.hpp"

namespace spandistill {

struct SourceSentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::string origin;
};

/// Tokenizes `text`. Throws std::invalid_argument if it has no tokens.
SourceSentence make_sentence(std::string id, std::string text, std::string origin = {});

/// One (label, span) annotation. `range` is set once the span is aligned.
struct LabelSpanPair {
  std::string label;
  std::string span_text;
  std::optional<TokenRange> range;

  bool operator==(const LabelSpanPair&) const = default;
};

struct DistillRecord {
  SourceSentence sentence;
  std::vector<LabelSpanPair> pairs;
  std::string raw_response;
  /// Set when the LLM call failed for good; `pairs` is then empty.
  std::optional<std::string> error;
};

/// Yields paragraphs until exhausted.
using ParagraphSource = std::function<std::optional<std::string>()>;

/// One paragraph per line. The stream must outlive the source.
ParagraphSource paragraphs_from_stream(std::istream& in);
/// The span must outlive the source.
ParagraphSource paragraphs_from(std::span<const std::string> paragraphs);

struct SampleResult {
  std::vector<SourceSentence> sentences;
  /// The source ran dry before `n` sentences were collected.
  bool exhausted = false;
  std::size_t paragraphs_read = 0;
  std::size_t duplicates_skipped = 0;
};

/// Takes the first sentence of each paragraph, skipping blank paragraphs and
/// exact-duplicate sentences, until `n` sentences are collected. Ids are
/// "<corpus_name>-<8-digit index>" so lexical order is sampling order.
SampleResult sample_sentences(const ParagraphSource& source, std::size_t n,
                              std::string_view corpus_name = "corpus");

/// Identifies the prompt text recorded with every synthesized dataset.
inline constexpr std::string_view kPromptVersion = "important-information/v1";

std::string build_prompt(const SourceSentence& sentence);

struct ParseResult {
  std::vector<LabelSpanPair> pairs;  // unaligned
  std::size_t matched_lines = 0;
  std::size_t unmatched_lines = 0;  // non-blank lines that did not fit "- Label: Span"
};

/// Reads "- <Label>: <Span>" lines; everything else is counted and skipped.
/// The label ends at the first colon. Spans are split on conjunctions.
ParseResult parse_llm_response(std::string_view response);

/// Splits on ", ", "; ", " and ", " or " scanning left to right; pieces are
/// trimmed and empty pieces dropped.
std::vector<std::string> split_conjunctions(std::string_view span_text);

/// Leftmost token range whose tokens equal the span's tokens. An exact-case
/// match anywhere wins over a case-insensitive one.
std::optional<TokenRange> align_span(std::span<const std::string> sentence_tokens,
                                     std::string_view span_text);
inline std::optional<TokenRange> align_span(const SourceSentence& sentence,
                                            std::string_view span_text) {
  return align_span(sentence.tokens, span_text);
}

struct SynthDiagnostics {
  std::size_t sentences = 0;
  std::size_t failed_records = 0;
  std::size_t retries = 0;
  std::size_t matched_lines = 0;
  std::size_t unmatched_lines = 0;
  std::size_t pairs_parsed = 0;      // after conjunction splitting
  std::size_t pairs_unaligned = 0;   // dropped: span not found in sentence
  std::size_t pairs_duplicate = 0;   // dropped: same (label, range) seen before
  std::size_t pairs_kept = 0;
  bool corpus_exhausted = false;

  double drop_rate() const {
    return pairs_parsed == 0 ? 0.0 : static_cast<double>(pairs_unaligned) / pairs_parsed;
  }
  SynthDiagnostics& operator+=(const SynthDiagnostics& o);
};

/// Parses a response for one sentence, aligns every pair and removes
/// unaligned and duplicate pairs. Pure.
DistillRecord annotate_sentence(const SourceSentence& sentence, std::string response,
                                SynthDiagnostics* diagnostics = nullptr);

struct SynthOptions {
  std::size_t n = 100000;
  std::size_t parallelism = 1;
  RetryPolicy retry;
  std::string corpus_name = "corpus";
};

struct SynthResult {
  std::vector<DistillRecord> records;  // sorted by sentence id
  SynthDiagnostics diagnostics;
};

/// Samples sentences, queries the client (up to `parallelism` requests in
/// flight) and annotates each response. A sentence whose request fails for
/// good still yields a record, with no pairs and `error` set.
SynthResult synthesize(const ParagraphSource& source, LlmClient& client,
                       const SynthOptions& options);

struct LabelStatsEntry {
  std::string label;
  std::size_t count = 0;
  double relative_frequency = 0.0;
};

struct LabelStatsBucket {
  std::string name;        // "1-gram" ... ">=5-gram"
  std::size_t total = 0;   // occurrences of all labels in the bucket
  std::size_t distinct = 0;
  std::vector<LabelStatsEntry> entries;  // count desc, then label asc
};

struct LabelStats {
  std::array<LabelStatsBucket, 5> buckets;
  std::size_t total = 0;
};

/// Label occurrence counts bucketed by the label's whitespace token count.
/// top_k == 0 keeps every label.
LabelStats label_stats(std::span<const DistillRecord> records, std::size_t top_k);

/// Uniform sample of k records without replacement, in input order.
/// Throws std::invalid_argument when k exceeds the record count.
std::vector<DistillRecord> subsample(std::span<const DistillRecord> records, std::size_t k,
                                     std::uint64_t seed);

}  // namespace spandistill
