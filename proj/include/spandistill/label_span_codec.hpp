// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spandistill/distill_synth.hpp"
#include "spandistill/token_range.hpp"

namespace spandistill {

// Query-conditioned BIO encoding. A query is the label followed by ":"; the
// tagger labels only the body (sentence) tokens, so spans extracted for a
// query are always typed by that query's label.

enum class Tag : std::uint8_t { B = 0, I = 1, O = 2 };

char tag_char(Tag t);
/// Accepts "B", "I" or "O". Throws std::invalid_argument otherwise.
Tag parse_tag(std::string_view s);

struct TaggedExample {
  std::string label;
  std::vector<std::string> prefix_tokens;  // label tokens + ":"; never tagged
  std::vector<std::string> body_tokens;
  std::vector<Tag> tags;  // empty until aligned, then one per body token

  bool operator==(const TaggedExample&) const = default;
};

/// Probabilities of (B, I, O) for each body token.
using TagProbs = std::array<double, 3>;
using TagDistribution = std::vector<TagProbs>;

struct ScoredSpan {
  std::string label;
  TokenRange range;
  double score = 0.0;

  bool operator==(const ScoredSpan&) const = default;
};

/// Floor applied to probabilities before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// Skeleton with prefix = tokenize(label + ":") and the given body.
/// Throws std::invalid_argument for a blank label.
TaggedExample encode_query(std::string_view label, std::span<const std::string> body_tokens);
inline TaggedExample encode_query(std::string_view label, const SourceSentence& sentence) {
  return encode_query(label, sentence.tokens);
}

/// B on the first token of each span, I on the rest, O elsewhere. Spans may
/// come in any order but must be non-empty, in bounds and pairwise disjoint;
/// otherwise std::invalid_argument.
TaggedExample align_tags(TaggedExample skeleton, std::span<const TokenRange> spans);

/// Maximal B I* runs. An I that follows O (or starts the sequence) opens a
/// new span as if it were B.
std::vector<TokenRange> decode_spans(std::span<const Tag> tags);

/// True when every I continues a B or I.
bool is_valid_bio(std::span<const Tag> tags);

/// Mean log-probability of the span's assigned tags (B on the first token,
/// I on the rest), each probability floored at kProbabilityFloor.
double bi_sequence_score(const TagDistribution& dist, TokenRange span);

/// Greedy selection by descending score; ties go to the earlier start, then
/// the shorter span, then the smaller label. A candidate survives if it
/// overlaps nothing already kept. The result is ordered by start.
std::vector<ScoredSpan> resolve_conflicts(std::vector<ScoredSpan> candidates);

/// Most probable tag; ties resolve toward O, then B.
Tag argmax_tag(const TagProbs& p);

/// Argmax tags, decoded into spans, each scored with bi_sequence_score.
std::vector<ScoredSpan> decode_with_probs(const TagDistribution& dist, std::string_view label);

/// Throws std::invalid_argument unless every triple lies in [0, 1] and sums
/// to 1 within 1e-6.
void check_distribution(const TagDistribution& dist);

/// One-hot distribution for the given tags.
TagDistribution one_hot(std::span<const Tag> tags);

}  // namespace spandistill
