// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/label_span_codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spandistill/text.hpp"

namespace spandistill {

char tag_char(Tag t) {
  switch (t) {
    case Tag::B:
      return 'B';
    case Tag::I:
      return 'I';
    case Tag::O:
      return 'O';
  }
  return '?';
}

Tag parse_tag(std::string_view s) {
  if (s == "B") return Tag::B;
  if (s == "I") return Tag::I;
  if (s == "O") return Tag::O;
  throw std::invalid_argument("unknown tag '" + std::string(s) + "'");
}

TaggedExample encode_query(std::string_view label, std::span<const std::string> body_tokens) {
  auto normalized = normalize_label(label);
  if (normalized.empty()) throw std::invalid_argument("encode_query: empty label");
  TaggedExample ex;
  ex.prefix_tokens = tokenize(normalized + ":");
  ex.label = std::move(normalized);
  ex.body_tokens.assign(body_tokens.begin(), body_tokens.end());
  return ex;
}

TaggedExample align_tags(TaggedExample skeleton, std::span<const TokenRange> spans) {
  std::vector<TokenRange> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = skeleton.body_tokens.size();
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& s = sorted[k];
    if (s.empty() || s.end > n) {
      throw std::invalid_argument("align_tags: span [" + std::to_string(s.begin) + "," +
                                  std::to_string(s.end) + ") outside body of " +
                                  std::to_string(n) + " tokens");
    }
    if (k > 0 && sorted[k - 1].overlaps(s)) {
      throw std::invalid_argument("align_tags: overlapping spans");
    }
  }
  skeleton.tags.assign(n, Tag::O);
  for (const auto& s : sorted) {
    skeleton.tags[s.begin] = Tag::B;
    for (auto i = s.begin + 1; i < s.end; ++i) skeleton.tags[i] = Tag::I;
  }
  return skeleton;
}

std::vector<TokenRange> decode_spans(std::span<const Tag> tags) {
  std::vector<TokenRange> spans;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    switch (tags[i]) {
      case Tag::B:
        spans.push_back({i, i + 1});
        open = true;
        break;
      case Tag::I:
        if (open) {
          spans.back().end = i + 1;
        } else {
          spans.push_back({i, i + 1});
          open = true;
        }
        break;
      case Tag::O:
        open = false;
        break;
    }
  }
  return spans;
}

bool is_valid_bio(std::span<const Tag> tags) {
  Tag prev = Tag::O;
  for (const auto t : tags) {
    if (t == Tag::I && prev == Tag::O) return false;
    prev = t;
  }
  return true;
}

double bi_sequence_score(const TagDistribution& dist, TokenRange span) {
  if (span.empty() || span.end > dist.size()) {
    throw std::invalid_argument("bi_sequence_score: span outside distribution");
  }
  double sum = 0.0;
  for (auto i = span.begin; i < span.end; ++i) {
    const auto tag = i == span.begin ? Tag::B : Tag::I;
    sum += std::log(std::max(dist[i][static_cast<std::size_t>(tag)], kProbabilityFloor));
  }
  return sum / static_cast<double>(span.size());
}

std::vector<ScoredSpan> resolve_conflicts(std::vector<ScoredSpan> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const ScoredSpan& a, const ScoredSpan& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.range.begin != b.range.begin) return a.range.begin < b.range.begin;
    if (a.range.size() != b.range.size()) return a.range.size() < b.range.size();
    return a.label < b.label;
  });
  std::vector<ScoredSpan> kept;
  for (auto& c : candidates) {
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](const ScoredSpan& k) { return k.range.overlaps(c.range); });
    if (!clash) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const ScoredSpan& a, const ScoredSpan& b) {
    return a.range.begin < b.range.begin;
  });
  return kept;
}

Tag argmax_tag(const TagProbs& p) {
  const double o = p[static_cast<std::size_t>(Tag::O)];
  const double b = p[static_cast<std::size_t>(Tag::B)];
  const double i = p[static_cast<std::size_t>(Tag::I)];
  if (o >= b && o >= i) return Tag::O;
  return b >= i ? Tag::B : Tag::I;
}

std::vector<ScoredSpan> decode_with_probs(const TagDistribution& dist, std::string_view label) {
  std::vector<Tag> tags;
  tags.reserve(dist.size());
  for (const auto& p : dist) tags.push_back(argmax_tag(p));
  std::vector<ScoredSpan> out;
  for (const auto& r : decode_spans(tags)) {
    out.push_back({std::string(label), r, bi_sequence_score(dist, r)});
  }
  return out;
}

void check_distribution(const TagDistribution& dist) {
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double sum = 0.0;
    for (const double p : dist[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("tag probability outside [0,1] at token " +
                                    std::to_string(i));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument("tag probabilities do not sum to 1 at token " +
                                  std::to_string(i));
    }
  }
}

TagDistribution one_hot(std::span<const Tag> tags) {
  TagDistribution dist(tags.size(), TagProbs{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < tags.size(); ++i) dist[i][static_cast<std::size_t>(tags[i])] = 1.0;
  return dist;
}

}  // namespace spandistill
