// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "spandistill/label_span_codec.hpp"
#include "spandistill/text.hpp"

using namespace spandistill;
using Tokens = std::vector<std::string>;

namespace {

std::vector<Tag> tags_of(std::string_view s) {
  std::vector<Tag> out;
  for (char c : s) {
    if (c != ' ') out.push_back(parse_tag(std::string_view(&c, 1)));
  }
  return out;
}

std::string tag_string(const std::vector<Tag>& tags) {
  std::string s;
  for (auto t : tags) s += tag_char(t);
  return s;
}

TagDistribution random_distribution(gen::Engine& e, std::size_t n) {
  TagDistribution d(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : d) {
    // Exact zeros exercise the floor.
    for (auto& x : p) x = gen::coin(e, 0.1) ? 0.0 : u(e);
    if (p[0] + p[1] + p[2] == 0.0) p[2] = 1.0;
    const double s = p[0] + p[1] + p[2];
    for (auto& x : p) x /= s;
  }
  return d;
}

}  // namespace

TEST_CASE("encode_query tags only the body") {
  const Tokens body = tokenize("John Smith loves his hometown, Los Angeles");
  auto q = encode_query("Location", body);
  CHECK(q.prefix_tokens == Tokens{"Location", ":"});
  CHECK(q.body_tokens == body);
  CHECK(q.tags.empty());
  auto ex = align_tags(q, std::vector<TokenRange>{{6, 8}});
  CHECK(tag_string(ex.tags) == "OOOOOOBI");
  CHECK(encode_query("  Time   period ", body).label == "Time period");
  CHECK(encode_query("Time period", body).prefix_tokens == Tokens{"Time", "period", ":"});
  CHECK_THROWS_AS(encode_query(" ", body), std::invalid_argument);
}

TEST_CASE("align_tags rejects bad spans") {
  const auto q = encode_query("X", Tokens{"a", "b", "c"});
  CHECK_THROWS_AS(align_tags(q, std::vector<TokenRange>{{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(align_tags(q, std::vector<TokenRange>{{2, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(align_tags(q, std::vector<TokenRange>{{0, 2}, {1, 3}}), std::invalid_argument);
  CHECK(tag_string(align_tags(q, std::vector<TokenRange>{{2, 3}, {0, 2}}).tags) == "BIB");
  CHECK(tag_string(align_tags(q, {}).tags) == "OOO");
}

TEST_CASE("decode_spans repairs stray I") {
  CHECK(decode_spans(tags_of("OIIOBIB")) == std::vector<TokenRange>{{1, 3}, {4, 6}, {6, 7}});
  CHECK(decode_spans(tags_of("I")) == std::vector<TokenRange>{{0, 1}});
  CHECK(decode_spans(tags_of("")).empty());
  CHECK(is_valid_bio(tags_of("BIOBB")));
  CHECK_FALSE(is_valid_bio(tags_of("OI")));
  CHECK_THROWS_AS(parse_tag("X"), std::invalid_argument);
}

TEST_CASE("align then decode is the identity on disjoint spans") {
  gen::Engine e(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto body = gen::sentence(e, 1, 20);
    const auto spans = gen::disjoint_spans(e, body.size());
    auto shuffled = spans;
    std::shuffle(shuffled.begin(), shuffled.end(), e);
    const auto ex = align_tags(encode_query(gen::label(e), body), shuffled);
    REQUIRE(ex.tags.size() == body.size());
    CHECK(is_valid_bio(ex.tags));
    CHECK(decode_spans(ex.tags) == spans);
  }
}

TEST_CASE("decode_spans matches the reference decoder on arbitrary tags") {
  gen::Engine e(12);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<Tag> tags(gen::uniform(e, 0, 16));
    for (auto& t : tags) t = static_cast<Tag>(gen::uniform(e, 0, 2));
    const auto got = decode_spans(tags);
    INFO(tag_string(tags));
    CHECK(got == oracle::decode(tags));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK_FALSE(got[i].empty());
      CHECK(got[i].end <= tags.size());
      if (i) CHECK(got[i - 1].end <= got[i].begin);
    }
  }
}

TEST_CASE("bi_sequence_score") {
  const TagDistribution d = {{0.5, 0.25, 0.25}, {0.1, 0.8, 0.1}, {0.0, 0.0, 1.0}};
  CHECK(bi_sequence_score(d, {0, 2}) == doctest::Approx((std::log(0.5) + std::log(0.8)) / 2));
  CHECK(bi_sequence_score(d, {1, 2}) == doctest::Approx(std::log(0.1)));
  CHECK(bi_sequence_score(d, {2, 3}) == doctest::Approx(std::log(kProbabilityFloor)));
  CHECK(std::isfinite(bi_sequence_score(d, {1, 3})));
  CHECK(bi_sequence_score(one_hot(tags_of("BII")), {0, 3}) == 0.0);
  CHECK_THROWS_AS(bi_sequence_score(d, {2, 4}), std::invalid_argument);
  CHECK_THROWS_AS(bi_sequence_score(d, {1, 1}), std::invalid_argument);

  gen::Engine e(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = gen::uniform(e, 1, 12);
    const auto d2 = random_distribution(e, n);
    const auto b = gen::uniform(e, 0, n - 1);
    const TokenRange r{b, gen::uniform(e, b + 1, n)};
    double sum = 0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      sum += std::log(std::max(d2[i][i == r.begin ? 0 : 1], 1e-12));
    }
    const double s = bi_sequence_score(d2, r);
    CHECK(s == doctest::Approx(sum / static_cast<double>(r.size())).epsilon(1e-12));
    CHECK(s <= 0.0);
    CHECK(s >= std::log(1e-12) - 1e-9);
  }
}

TEST_CASE("resolve_conflicts") {
  const std::vector<ScoredSpan> c = {
      {"B", {0, 2}, -0.5}, {"A", {1, 3}, -0.1}, {"C", {3, 4}, -0.1}, {"A", {0, 1}, -0.5}};
  CHECK(resolve_conflicts(c) == std::vector<ScoredSpan>{{"A", {0, 1}, -0.5}, {"A", {1, 3}, -0.1}, {"C", {3, 4}, -0.1}});
  // equal scores: earlier start, then shorter, then label
  CHECK(resolve_conflicts({{"A", {0, 3}, 0}, {"A", {0, 2}, 0}}) == std::vector<ScoredSpan>{{"A", {0, 2}, 0}});
  CHECK(resolve_conflicts({{"Z", {0, 2}, 0}, {"M", {0, 2}, 0}}) == std::vector<ScoredSpan>{{"M", {0, 2}, 0}});
  CHECK(resolve_conflicts({{"A", {2, 3}, 0}, {"A", {1, 3}, 0}}) == std::vector<ScoredSpan>{{"A", {1, 3}, 0}});
  CHECK(resolve_conflicts({}).empty());
}

TEST_CASE("resolve_conflicts matches brute-force enumeration") {
  gen::Engine e(14);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto n = gen::uniform(e, 1, 10);
    auto cands = gen::candidates(e, n, 10);
    const auto got = resolve_conflicts(cands);
    CHECK(got == oracle::resolve(cands));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::find(cands.begin(), cands.end(), got[i]) != cands.end());
      for (std::size_t j = i + 1; j < got.size(); ++j) CHECK_FALSE(got[i].range.overlaps(got[j].range));
      if (i) CHECK(got[i - 1].range.begin <= got[i].range.begin);
    }
    // Maximality: every dropped candidate overlaps a kept one that precedes it.
    for (const auto& c : cands) {
      if (std::find(got.begin(), got.end(), c) != got.end()) continue;
      bool blocked = false;
      for (const auto& k : got) blocked = blocked || (k.range.overlaps(c.range) && !oracle::precedes(c, k));
      CHECK(blocked);
    }
  }
}

TEST_CASE("resolve_conflicts keeps survivors in order when a kept span is removed") {
  gen::Engine e(15);
  for (int trial = 0; trial < 2000; ++trial) {
    auto cands = gen::candidates(e, gen::uniform(e, 1, 10), 10);
    const auto kept = resolve_conflicts(cands);
    if (kept.empty()) continue;
    const auto& gone = kept[gen::uniform(e, 0, kept.size() - 1)];
    std::erase(cands, gone);
    const auto again = resolve_conflicts(cands);
    std::vector<ScoredSpan> before, after;
    for (const auto& k : kept) {
      if (!(k == gone) && std::find(again.begin(), again.end(), k) != again.end()) before.push_back(k);
    }
    for (const auto& k : again) {
      if (std::find(kept.begin(), kept.end(), k) != kept.end()) after.push_back(k);
    }
    CHECK(before == after);
  }
}

TEST_CASE("bi_sequence_score ignores tokens outside the span") {
  gen::Engine e(16);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = gen::uniform(e, 1, 12);
    auto d = random_distribution(e, n);
    const auto b = gen::uniform(e, 0, n - 1);
    const TokenRange r{b, gen::uniform(e, b + 1, n)};
    const double s = bi_sequence_score(d, r);
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < r.begin || i >= r.end) outside.push_back(i);
    }
    auto shuffled = outside;
    std::shuffle(shuffled.begin(), shuffled.end(), e);
    auto permuted = d;
    for (std::size_t i = 0; i < outside.size(); ++i) permuted[outside[i]] = d[shuffled[i]];
    CHECK(bi_sequence_score(permuted, r) == s);
  }
}

TEST_CASE("bi_sequence_score rises with any assigned-tag probability") {
  gen::Engine e(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = gen::uniform(e, 1, 12);
    auto d = random_distribution(e, n);
    const auto b = gen::uniform(e, 0, n - 1);
    const TokenRange r{b, gen::uniform(e, b + 1, n)};
    const auto i = gen::uniform(e, r.begin, r.end - 1);
    const std::size_t tag = i == r.begin ? 0 : 1;
    auto& p = d[i];
    p[tag] = std::max(p[tag], 1e-6);
    const double s = bi_sequence_score(d, r);
    // move a share of the other mass onto the assigned tag
    const double rest = 1.0 - p[tag];
    if (rest <= 1e-9) continue;
    const double share = 0.1 + 0.8 * u(e);
    for (std::size_t k = 0; k < 3; ++k) {
      if (k != tag) p[k] *= 1.0 - share;
    }
    p[tag] += rest * share;
    CHECK(bi_sequence_score(d, r) > s);
  }
}

TEST_CASE("argmax_tag breaks ties toward O then B") {
  CHECK(argmax_tag({0.6, 0.3, 0.1}) == Tag::B);
  CHECK(argmax_tag({0.2, 0.5, 0.3}) == Tag::I);
  CHECK(argmax_tag({0.4, 0.2, 0.4}) == Tag::O);
  CHECK(argmax_tag({0.4, 0.4, 0.2}) == Tag::B);
  CHECK(argmax_tag({1.0 / 3, 1.0 / 3, 1.0 / 3}) == Tag::O);
}

TEST_CASE("decode_with_probs scores argmax spans") {
  const TagDistribution d = {{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}, {0.1, 0.1, 0.8}, {0.2, 0.5, 0.3}};
  const auto spans = decode_with_probs(d, "X");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].range == TokenRange{0, 2});
  CHECK(spans[0].score == doctest::Approx((std::log(0.7) + std::log(0.6)) / 2));
  CHECK(spans[1].range == TokenRange{3, 4});
  CHECK(spans[1].score == doctest::Approx(std::log(0.2)));
  CHECK(spans[1].label == "X");

  gen::Engine e(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dist = random_distribution(e, gen::uniform(e, 0, 12));
    std::vector<Tag> tags;
    for (const auto& p : dist) tags.push_back(argmax_tag(p));
    const auto got = decode_with_probs(dist, "L");
    const auto want = oracle::decode(tags);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].range == want[i]);
      CHECK(got[i].score == bi_sequence_score(dist, want[i]));
    }
  }
}

TEST_CASE("check_distribution") {
  CHECK_NOTHROW(check_distribution({{0.2, 0.3, 0.5}}));
  CHECK_THROWS_AS(check_distribution({{0.2, 0.3, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(check_distribution({{-0.1, 0.6, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(check_distribution({{NAN, 0.5, 0.5}}), std::invalid_argument);
  CHECK(one_hot(tags_of("BO")) == TagDistribution{{1, 0, 0}, {0, 0, 1}});
}
