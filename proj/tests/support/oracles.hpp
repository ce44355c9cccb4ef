// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations. Deliberately naive and written
// without reusing library code paths.

#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "spandistill/label_span_codec.hpp"
#include "spandistill/task_adapters.hpp"

namespace oracle {

inline std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Cut at the earliest delimiter occurrence, repeatedly.
inline std::vector<std::string> split(std::string_view s) {
  static const std::vector<std::string> kDelims = {", ", "; ", " and ", " or "};
  std::vector<std::string> out;
  std::size_t from = 0;
  for (;;) {
    std::size_t best = std::string_view::npos, width = 0;
    for (const auto& d : kDelims) {
      const auto at = s.find(d, from);
      if (at < best) {
        best = at;
        width = d.size();
      }
    }
    const auto piece = strip(s.substr(from, best == std::string_view::npos ? std::string_view::npos : best - from));
    if (!piece.empty()) out.push_back(piece);
    if (best == std::string_view::npos) break;
    from = best + width;
  }
  return out;
}

// Spans from a tag string such as "BIOOIB": a span opens at B, or at I with
// no span running, and closes before the next token that is not I.
inline std::vector<spandistill::TokenRange> decode(const std::vector<spandistill::Tag>& tags) {
  std::string s;
  for (auto t : tags) s += t == spandistill::Tag::B ? 'B' : t == spandistill::Tag::I ? 'I' : 'O';
  std::vector<spandistill::TokenRange> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == 'O') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && s[j] == 'I') ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

// True when `a` should be kept before `b`.
inline bool precedes(const spandistill::ScoredSpan& a, const spandistill::ScoredSpan& b) {
  return std::make_tuple(-a.score, a.range.begin, a.range.size(), a.label) <
         std::make_tuple(-b.score, b.range.begin, b.range.size(), b.label);
}

// Greedy selection is the non-overlapping subset whose membership vector,
// read in priority order, is lexicographically largest. Enumerate them all.
inline std::vector<spandistill::ScoredSpan> resolve(std::vector<spandistill::ScoredSpan> c) {
  std::sort(c.begin(), c.end(), precedes);
  const std::size_t n = c.size();
  unsigned long best_key = 0;
  unsigned best_mask = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        if ((mask >> j & 1u) && c[i].range.begin < c[j].range.end && c[j].range.begin < c[i].range.end) ok = false;
      }
    }
    if (!ok) continue;
    unsigned long key = 0;
    for (std::size_t i = 0; i < n; ++i) key |= static_cast<unsigned long>(mask >> i & 1u) << (n - 1 - i);
    if (key > best_key) {
      best_key = key;
      best_mask = mask;
    }
  }
  std::vector<spandistill::ScoredSpan> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask >> i & 1u) out.push_back(c[i]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.range.begin < b.range.begin; });
  return out;
}

struct Tally {
  std::size_t tp = 0, fp = 0, fn = 0;
};

// Pairs each prediction with the first unused equal gold tuple.
inline Tally count(const std::vector<spandistill::TaskTuple>& preds,
                   const std::vector<spandistill::TaskTuple>& golds) {
  std::vector<bool> used(golds.size(), false);
  Tally t;
  for (const auto& p : preds) {
    bool hit = false;
    for (std::size_t g = 0; g < golds.size() && !hit; ++g) {
      if (!used[g] && golds[g].sentence_id == p.sentence_id && golds[g].kind == p.kind &&
          golds[g].tags == p.tags && golds[g].spans == p.spans) {
        used[g] = true;
        hit = true;
      }
    }
    hit ? ++t.tp : ++t.fp;
  }
  t.fn = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return t;
}

inline double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

inline double f1(const Tally& t) {
  const double p = ratio(t.tp, t.tp + t.fp), r = ratio(t.tp, t.tp + t.fn);
  return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
}

}  // namespace oracle
