// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "spandistill/evaluator.hpp"
#include "spandistill/text.hpp"

using namespace spandistill;

namespace {

std::vector<TaskTuple> keep(const std::vector<TaskTuple>& v, const std::string& kind) {
  std::vector<TaskTuple> out;
  for (const auto& t : v) {
    if (t.kind == kind) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("micro_f1 on a hand-checked case") {
  const auto ner = default_schema(TaskId::NER);
  const std::vector<TaskTuple> gold = {{"s1", "entity", {"Person"}, {{0, 2}}},
                                       {"s1", "entity", {"Location"}, {{6, 8}}},
                                       {"s2", "entity", {"Person"}, {{0, 1}}}};
  const std::vector<TaskTuple> pred = {{"s1", "entity", {"Person"}, {{0, 2}}},
                                       {"s1", "entity", {"Person"}, {{6, 8}}},
                                       {"s2", "entity", {"Person"}, {{0, 1}}},
                                       {"s2", "entity", {"Person"}, {{3, 4}}}};
  const auto r = micro_f1(ner, pred, gold, EvalMode::Full);
  CHECK(r.overall.tp == 2);
  CHECK(r.overall.fp == 2);
  CHECK(r.overall.fn == 1);
  CHECK(r.overall.precision == doctest::Approx(0.5));
  CHECK(r.overall.recall == doctest::Approx(2.0 / 3));
  CHECK(r.overall.f1 == doctest::Approx(4.0 / 7));
  CHECK(r.per_label.at("entity:Person").fp == 2);
  CHECK(r.per_label.at("entity:Location").fn == 1);

  const auto empty = micro_f1(ner, {}, {}, EvalMode::Full);
  CHECK(empty.overall.f1 == 0.0);
  CHECK(micro_f1(ner, gold, gold, EvalMode::Full).overall.f1 == 1.0);
}

TEST_CASE("micro_f1 matches the brute-force counter") {
  gen::Engine e(41);
  const auto ner = default_schema(TaskId::NER);
  const auto re = default_schema(TaskId::RE);
  for (int trial = 0; trial < 2000; ++trial) {
    const bool relations = gen::coin(e);
    const auto pred = gen::tuples(e, 8, relations);
    const auto gold = gen::tuples(e, 8, relations);
    const auto& schema = relations ? re : ner;
    const auto r = micro_f1(schema, pred, gold, EvalMode::Full);
    const auto t = oracle::count(pred, gold);
    CHECK(r.overall.tp == t.tp);
    CHECK(r.overall.fp == t.fp);
    CHECK(r.overall.fn == t.fn);
    CHECK(r.overall.f1 == doctest::Approx(oracle::f1(t)));
    CHECK(r.overall.tp + r.overall.fp == pred.size());
    CHECK(r.overall.tp + r.overall.fn == gold.size());
    std::size_t tp = 0;
    for (const auto& [_, c] : r.per_label) tp += c.tp;
    CHECK(tp == r.overall.tp);

    if (relations) {
      const auto rel = micro_f1(re, pred, gold, EvalMode::ReRelation);
      const auto tr = oracle::count(keep(pred, "relation"), keep(gold, "relation"));
      CHECK(rel.overall.tp == tr.tp);
      CHECK(rel.overall.fp == tr.fp);
      CHECK(rel.overall.fn == tr.fn);

      auto unique = [](std::vector<TaskTuple> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
      };
      const auto ent = micro_f1(re, pred, gold, EvalMode::ReEntity);
      const auto te = oracle::count(unique(keep(pred, "entity")), unique(keep(gold, "entity")));
      CHECK(ent.overall.tp == te.tp);
      CHECK(ent.overall.fp == te.fp);
      CHECK(ent.overall.fn == te.fn);
    }
  }
}

TEST_CASE("micro_f1 ignores input order") {
  gen::Engine e(42);
  const auto re = default_schema(TaskId::RE);
  for (int trial = 0; trial < 500; ++trial) {
    auto pred = gen::tuples(e, 8, true);
    auto gold = gen::tuples(e, 8, true);
    const auto r = micro_f1(re, pred, gold, EvalMode::Full);
    std::shuffle(pred.begin(), pred.end(), e);
    std::shuffle(gold.begin(), gold.end(), e);
    const auto s = micro_f1(re, pred, gold, EvalMode::Full);
    CHECK(s.overall.tp == r.overall.tp);
    CHECK(s.overall.fp == r.overall.fp);
    CHECK(s.overall.fn == r.overall.fn);
    CHECK(s.overall.f1 == r.overall.f1);
  }
}

TEST_CASE("turning a false positive into a match never lowers F1") {
  gen::Engine e(43);
  const auto ner = default_schema(TaskId::NER);
  std::size_t tried = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto pred = gen::tuples(e, 8, false);
    const auto gold = gen::tuples(e, 8, false);
    std::vector<std::size_t> fps;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (std::find(gold.begin(), gold.end(), pred[i]) == gold.end()) fps.push_back(i);
    }
    std::vector<TaskTuple> missed;
    for (const auto& g : gold) {
      if (std::find(pred.begin(), pred.end(), g) == pred.end()) missed.push_back(g);
    }
    if (fps.empty() || missed.empty()) continue;
    const double before = micro_f1(ner, pred, gold, EvalMode::Full).overall.f1;
    pred[fps[gen::uniform(e, 0, fps.size() - 1)]] = missed[gen::uniform(e, 0, missed.size() - 1)];
    CHECK(micro_f1(ner, pred, gold, EvalMode::Full).overall.f1 >= before);
    ++tried;
  }
  CHECK(tried > 100);
}

TEST_CASE("unlabeled event modes drop the type") {
  const auto ee = default_schema(TaskId::EE);
  const std::vector<TaskTuple> gold = {{"s", "trigger", {"Attack"}, {{2, 3}}},
                                       {"s", "argument", {"Victim"}, {{2, 3}, {6, 8}}}};
  const std::vector<TaskTuple> pred = {{"s", "trigger", {"Trigger"}, {{2, 3}}},
                                       {"s", "argument", {"Argument"}, {{2, 3}, {6, 8}}}};
  CHECK(micro_f1(ee, pred, gold, EvalMode::EeTriggerUnlabeled).overall.f1 == 1.0);
  CHECK(micro_f1(ee, pred, gold, EvalMode::EeArgumentUnlabeled).overall.f1 == 1.0);
  CHECK(micro_f1(ee, pred, gold, EvalMode::Full).overall.f1 == 0.0);
  CHECK_THROWS_AS(micro_f1(ee, pred, gold, EvalMode::ReEntity), std::invalid_argument);
  CHECK_THROWS_AS(micro_f1(default_schema(TaskId::NER), pred, gold, EvalMode::EeTriggerUnlabeled),
                  std::invalid_argument);
}

TEST_CASE("SRL full mode scores roles only") {
  const auto srl = default_schema(TaskId::SRL);
  const std::vector<TaskTuple> gold = {{"s", "predicate", {"V"}, {{2, 3}}}, {"s", "role", {"A1"}, {{2, 3}, {4, 5}}}};
  const std::vector<TaskTuple> pred = {{"s", "role", {"A1"}, {{2, 3}, {4, 5}}}};
  const auto r = micro_f1(srl, pred, gold, EvalMode::Full);
  CHECK(r.overall.tp == 1);
  CHECK(r.overall.fn == 0);
}

TEST_CASE("mode names") {
  for (auto m : {EvalMode::Full, EvalMode::ReEntity, EvalMode::ReRelation, EvalMode::EeTriggerUnlabeled,
                 EvalMode::EeArgumentUnlabeled}) {
    CHECK(parse_mode(mode_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("strict"), std::invalid_argument);
}

TEST_CASE("evaluate_run is independent of the thread count") {
  gen::Engine e(42);
  const auto schema = default_schema(TaskId::NER);
  std::vector<TaskItem> items;
  std::vector<TaggedExample> answers;
  for (int i = 0; i < 60; ++i) {
    TaskItem item{"s" + std::to_string(i), gen::sentence(e, 1, 10), {}, {}};
    for (const auto& r : gen::disjoint_spans(e, item.tokens.size())) {
      item.gold.push_back({item.id, "entity", {gen::coin(e) ? "Person" : "Location"}, {r}});
    }
    // The tagger knows only a part of the answers.
    if (i % 3) {
      const auto ex = to_training_examples(schema, std::span(&item, 1));
      answers.insert(answers.end(), ex.begin(), ex.end());
    }
    items.push_back(item);
  }
  const OracleTagger tagger(answers);
  const auto one = evaluate_run(schema, tagger, items, EvalMode::Full, 1);
  for (std::size_t p : {2, 4, 16}) {
    const auto many = evaluate_run(schema, tagger, items, EvalMode::Full, p);
    CHECK(many.overall.tp == one.overall.tp);
    CHECK(many.overall.fp == one.overall.fp);
    CHECK(many.overall.fn == one.overall.fn);
    CHECK(many.to_csv("r") == one.to_csv("r"));
  }
  CHECK(one.sentences == 60);
  CHECK(one.overall.fp == 0);
  CHECK(one.overall.precision == doctest::Approx(1.0));
  CHECK(one.overall.recall < 1.0);
}

TEST_CASE("report rendering") {
  const auto ner = default_schema(TaskId::NER);
  const std::vector<TaskTuple> gold = {{"s", "entity", {"Person"}, {{0, 1}}}};
  auto r = micro_f1(ner, gold, gold, EvalMode::Full);
  const auto table = r.to_table();
  CHECK(table.find("entity:Person") != std::string::npos);
  CHECK(table.find("overall") != std::string::npos);
  const auto csv = r.to_csv("run, \"a\"");
  CHECK(csv.rfind("run,task,mode,label,tp,fp,fn,precision,recall,f1\n", 0) == 0);
  CHECK(csv.find("\"run, \"\"a\"\"\",ner,full,entity:Person,1,0,0,1.000000,1.000000,1.000000\n") !=
        std::string::npos);
}
