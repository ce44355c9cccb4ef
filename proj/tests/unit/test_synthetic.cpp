// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "spandistill/distill_synth.hpp"
#include "spandistill/synthetic.hpp"
#include "spandistill/text.hpp"

using namespace spandistill;

TEST_CASE("mock client answers in the prompt's format") {
  RuleBasedMockClient client;
  const auto s = make_sentence("x", "Maria Lopez visited Berlin on March 3 with 40 people from Acme Corp.");
  const auto reply = client.complete(build_prompt(s));
  CHECK(reply == RuleBasedMockClient::annotate(s.text));
  const auto parsed = annotate_sentence(s, reply);
  CHECK(parsed.pairs.size() >= 3);
  std::set<std::string> spans;
  for (const auto& p : parsed.pairs) spans.insert(p.span_text);
  CHECK(spans.contains("Berlin"));
  CHECK(spans.contains("March 3"));
}

TEST_CASE("mock client is deterministic and varies its labels") {
  const auto corpus = synthetic_corpus(300, 5);
  CHECK(corpus == synthetic_corpus(300, 5));
  CHECK(corpus != synthetic_corpus(300, 6));
  RuleBasedMockClient client;
  SynthOptions o;
  o.n = 300;
  o.parallelism = 4;
  o.retry.initial_backoff = std::chrono::milliseconds(0);
  const auto a = synthesize(paragraphs_from(corpus), client, o);
  o.parallelism = 1;
  const auto b = synthesize(paragraphs_from(corpus), client, o);
  REQUIRE(a.records.size() == b.records.size());
  std::set<std::string> labels;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].pairs == b.records[i].pairs);
    for (const auto& p : a.records[i].pairs) labels.insert(p.label);
  }
  CHECK(labels.contains("Location"));
  CHECK(labels.contains("City"));
  CHECK(labels.contains("Time period"));
  CHECK(labels.contains("Number of people affected"));
  CHECK(a.diagnostics.pairs_unaligned > 0);
  CHECK(a.diagnostics.drop_rate() < 0.2);
  CHECK(a.diagnostics.failed_records == 0);
}

TEST_CASE("synthesized pairs point at their span text") {
  RuleBasedMockClient client;
  SynthOptions o;
  o.n = 500;
  const auto r = synthesize(paragraphs_from(synthetic_corpus(600, 12)), client, o);
  std::size_t pairs = 0;
  for (const auto& rec : r.records) {
    for (const auto& p : rec.pairs) {
      REQUIRE(p.range.has_value());
      const auto [i, j] = *p.range;
      CHECK(i < j);
      CHECK(j <= rec.sentence.tokens.size());
      const std::span<const std::string> toks(rec.sentence.tokens);
      CHECK(ascii_lower(detokenize(toks.subspan(i, j - i))) == ascii_lower(p.span_text));
      ++pairs;
    }
  }
  CHECK(pairs > 500);
}

TEST_CASE("synthetic NER items carry exact gold spans") {
  const auto items = synthetic_ner_items(200, 9);
  REQUIRE(items.size() == 200);
  std::set<std::string> ids, types;
  for (const auto& item : items) {
    CHECK(ids.insert(item.id).second);
    CHECK_FALSE(item.gold.empty());
    for (const auto& t : item.gold) {
      CHECK(t.kind == "entity");
      CHECK(t.spans.size() == 1);
      CHECK(t.spans[0].end <= item.tokens.size());
      types.insert(t.tags[0]);
    }
  }
  CHECK(types == std::set<std::string>{"Location", "Organization", "Person"});
  CHECK(synthetic_ner_items(5, 9, "t")[0].id.rfind("t", 0) == 0);
}
