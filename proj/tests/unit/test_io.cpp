// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "../support/generators.hpp"
#include "spandistill/error.hpp"
#include "spandistill/io.hpp"
#include "spandistill/text.hpp"

using namespace spandistill;
namespace fs = std::filesystem;

namespace {

std::string data_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::vector<TaskItem> parse_items(const std::string& text, TaskId task) {
  std::istringstream in(text);
  return task_items_from_jsonl(in, task);
}

}  // namespace

TEST_CASE("distillation records round-trip through JSONL") {
  gen::Engine e(51);
  std::vector<DistillRecord> records;
  for (int i = 0; i < 50; ++i) {
    DistillRecord r;
    auto tokens = gen::sentence(e, 1, 10);
    r.sentence = make_sentence("c-" + std::to_string(i), detokenize(tokens), gen::coin(e) ? "web:3" : "");
    for (const auto& range : gen::disjoint_spans(e, r.sentence.tokens.size())) {
      r.pairs.push_back({gen::label(e), "span \"text\"", range});
    }
    r.raw_response = "- A: b\n- C: \xc3\xa9";
    if (gen::coin(e, 0.2)) {
      r.error = "HTTP 400";
      r.pairs.clear();
    }
    records.push_back(r);
  }
  const auto text = records_to_jsonl(records);
  std::istringstream in(text);
  const auto back = records_from_jsonl(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].sentence.id == records[i].sentence.id);
    CHECK(back[i].sentence.tokens == records[i].sentence.tokens);
    CHECK(back[i].sentence.origin == records[i].sentence.origin);
    CHECK(back[i].pairs == records[i].pairs);
    CHECK(back[i].raw_response == records[i].raw_response);
    CHECK(back[i].error == records[i].error);
  }
  CHECK(records_to_jsonl(back) == text);
}

TEST_CASE("malformed record lines name the line") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return records_from_jsonl(in);
  };
  const std::string good = R"({"id":"a","text":"x y","pairs":[],"raw_response":""})";
  CHECK(parse(good + "\n\n").size() == 1);
  CHECK(data_error([&] { parse(good + "\n{oops\n"); }).find("line 2") != std::string::npos);
  CHECK(data_error([&] { parse(good + "\n" + good + "\n"); }).find("duplicate") != std::string::npos);
  CHECK_FALSE(data_error([&] { parse(R"({"text":"x"})"); }).empty());
  CHECK_FALSE(data_error([&] { parse(R"({"id":"a","text":"x y","pairs":[{"label":"L","span":"x","start":1,"end":5}],"raw_response":""})"); }).empty());
  CHECK(data_error([] { read_records("/nonexistent/records.jsonl"); }).find("/nonexistent/records.jsonl") !=
        std::string::npos);
}

TEST_CASE("tagged examples round-trip") {
  gen::Engine e(52);
  std::vector<TaggedExample> ex;
  for (int i = 0; i < 30; ++i) {
    const auto body = gen::sentence(e, 1, 10);
    ex.push_back(align_tags(encode_query(gen::label(e), body), gen::disjoint_spans(e, body.size())));
  }
  std::istringstream in(examples_to_jsonl(ex));
  CHECK(examples_from_jsonl(in) == ex);
  std::istringstream bad(R"({"label":"X","tokens":["a","b"],"tags":["B"]})");
  CHECK_THROWS_AS(examples_from_jsonl(bad), DataError);
}

TEST_CASE("train config JSON") {
  Json j = {{"learning_rate", 0.01}, {"epochs", 3}};
  const auto c = train_config_from_json(j);
  CHECK(c.learning_rate == 0.01);
  CHECK(c.epochs == 3);
  CHECK(c.batch_size == 64);
  CHECK(train_config_from_json(train_config_to_json(c)).epochs == 3);
  CHECK_THROWS_AS(train_config_from_json(Json{{"learnin_rate", 0.1}}), DataError);
}

TEST_CASE("schemas round-trip through JSON") {
  for (auto t : {TaskId::NER, TaskId::RE, TaskId::EE, TaskId::SRL, TaskId::ABSA, TaskId::ASTE}) {
    const auto s = default_schema(t);
    const auto j = schema_to_json(s);
    const auto back = schema_from_json(j);
    CHECK(schema_to_json(back) == j);
    CHECK(back.fewshot.rule == s.fewshot.rule);
    REQUIRE(back.stages.size() == s.stages.size());
    for (std::size_t i = 0; i < s.stages.size(); ++i) {
      REQUIRE(back.stages[i].queries.size() == s.stages[i].queries.size());
      for (std::size_t q = 0; q < s.stages[i].queries.size(); ++q)
        CHECK(back.stages[i].queries[q].label_template == s.stages[i].queries[q].label_template);
    }
  }
  const auto custom = schema_from_json(Json::parse(
      R"({"task":"ner","entity_types":{"PER":"Person","GPE":"Country"},"fewshot":{"rule":"absolute","count":7}})"));
  REQUIRE(custom.stages[0].queries.size() == 2);
  CHECK(custom.stages[0].queries[1].label_template == "Country");
  CHECK(custom.stages[0].queries[1].tag == "GPE");
  CHECK(custom.fewshot.rule == FewShotRule::Absolute);
  CHECK(custom.fewshot.count == 7);
  CHECK_THROWS_AS(schema_from_json(Json::parse(R"({"task":"ner","entity_typos":{}})")), DataError);
  CHECK_THROWS(schema_from_json(Json::parse(R"({"task":"pos"})")));
}

TEST_CASE("task items accept offsets, text and bare strings") {
  const auto items = parse_items(
      R"({"id":"a","text":"John Smith loves his hometown, Los Angeles","entities":[{"start":0,"end":2,"type":"Person"},{"text":"Los Angeles","type":"Location"}],"relations":[{"type":"Born_In","head":"John Smith","tail":{"start":6,"end":8}}]})"
      "\n"
      R"({"tokens":["x","y"]})",
      TaskId::RE);
  REQUIRE(items.size() == 2);
  const auto& a = items[0];
  REQUIRE(a.gold.size() == 3);
  CHECK(a.gold[0] == TaskTuple{"a", "entity", {"Location"}, {{6, 8}}});
  CHECK(a.gold[1] == TaskTuple{"a", "entity", {"Person"}, {{0, 2}}});
  CHECK(a.gold[2] == TaskTuple{"a", "relation", {"Born_In"}, {{0, 2}, {6, 8}}});
  CHECK(items[1].id == "line-2");
  CHECK(items[1].gold.empty());
  CHECK(task_items_to_jsonl(items, TaskId::RE).find("hometown, Los Angeles") != std::string::npos);
}

TEST_CASE("task items per task") {
  const auto ee = parse_items(
      R"({"id":"e","tokens":["He","attacked","Rome"],"triggers":[{"text":"attacked","type":"Attack"}],"arguments":[{"role":"Target","trigger":"attacked","argument":"Rome"}]})",
      TaskId::EE);
  CHECK(ee[0].gold.size() == 2);
  const auto srl = parse_items(
      R"({"id":"s","tokens":["He","ate","fish"],"roles":[{"role":"A1","predicate":"ate","argument":"fish"}]})", TaskId::SRL);
  REQUIRE(srl[0].gold.size() == 2);
  CHECK(srl[0].gold[0] == TaskTuple{"s", "predicate", {"V"}, {{1, 2}}});
  const auto aste = parse_items(
      R"({"id":"t","tokens":["great","food"],"triplets":[{"aspect":"food","opinion":"great","polarity":"positive"}]})",
      TaskId::ASTE);
  REQUIRE(aste[0].gold.size() == 2);
  CHECK(aste[0].gold[1] == TaskTuple{"t", "triplet", {"positive"}, {{1, 2}, {0, 1}}});
}

TEST_CASE("generated items render and parse back") {
  std::vector<TaskItem> items = {{"a", {"x", "y", "z"}, {{"a", "entity", {"Person"}, {{0, 1}}}, {"a", "relation", {"R"}, {{0, 1}, {2, 3}}}}, {}}};
  const auto text = task_items_to_jsonl(items, TaskId::RE);
  const auto back = parse_items(text, TaskId::RE);
  CHECK(back[0].gold == items[0].gold);
}

TEST_CASE("bad task items") {
  CHECK(data_error([] { parse_items(R"({"id":"a","tokens":["x"],"entities":[{"text":"nope","type":"P"}]})", TaskId::NER); })
            .find("line 1") != std::string::npos);
  CHECK_FALSE(data_error([] { parse_items(R"({"id":"a"})", TaskId::NER); }).empty());
  CHECK_FALSE(data_error([] { parse_items(R"({"id":"a","tokens":["x"],"entities":[{"start":0,"end":2,"type":"P"}]})", TaskId::NER); }).empty());
  CHECK_FALSE(data_error([] { parse_items("{\"id\":\"a\",\"tokens\":[\"x\"]}\n{\"id\":\"a\",\"tokens\":[\"x\"]}", TaskId::NER); }).empty());
}

TEST_CASE("atomic writes") {
  const auto dir = fs::temp_directory_path() / "spandistill-io-test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "f.txt", "one");
  write_file_atomic(dir / "f.txt", "two");
  CHECK(read_file(dir / "f.txt") == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& _ : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "f.txt", "x"), DataError);
  fs::remove_all(dir);
}

TEST_CASE("report JSON") {
  SynthDiagnostics d;
  d.pairs_parsed = 4;
  d.pairs_unaligned = 1;
  CHECK(diagnostics_to_json(d)["drop_rate"] == 0.25);
  CHECK(tuple_to_json({"s", "entity", {"P"}, {{1, 2}}}).dump() ==
        R"({"sentence_id":"s","kind":"entity","tags":["P"],"spans":[[1,2]]})");
  const auto ts = utc_timestamp();
  CHECK(ts.size() == 20);
  CHECK(ts.back() == 'Z');
}
