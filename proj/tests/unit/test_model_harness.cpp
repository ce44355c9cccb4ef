// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/generators.hpp"
#include "spandistill/error.hpp"
#include "spandistill/model_harness.hpp"
#include "spandistill/synthetic.hpp"
#include "spandistill/text.hpp"
#include "spandistill/toy_tagger.hpp"

using namespace spandistill;
using Tokens = std::vector<std::string>;

namespace {

struct Recorder : Tagger {
  std::size_t total_steps = 0;
  std::vector<std::size_t> sizes;
  std::vector<double> rates;
  std::vector<const TaggedExample*> seen;
  TagDistribution predict(const TaggedExample& q) const override {
    return TagDistribution(q.body_tokens.size(), TagProbs{0, 0, 1});
  }
  void begin_training(const TrainConfig&, std::size_t steps) override { total_steps = steps; }
  double train_batch(std::span<const TaggedExample* const> batch, double lr) override {
    sizes.push_back(batch.size());
    rates.push_back(lr);
    seen.insert(seen.end(), batch.begin(), batch.end());
    return 1.0;
  }
  std::string kind() const override { return "recorder"; }
  std::unique_ptr<Tagger> clone() const override { return std::make_unique<Recorder>(*this); }
};

std::vector<TaggedExample> plain_examples(std::size_t n) {
  std::vector<TaggedExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(align_tags(encode_query("X", Tokens{"a"}), {}));
  return out;
}

// "<Name> visited <City>" with Person and Location queries.
std::vector<TaggedExample> separable_examples(std::size_t n) {
  const Tokens names = {"Anna", "Boris", "Chen", "Dana", "Emil"};
  const Tokens cities = {"Oslo", "Lima", "Kyiv", "Doha", "Nice"};
  std::vector<TaggedExample> out;
  for (std::size_t i = 0; out.size() < n; ++i) {
    const Tokens body = {names[i % 5], "visited", cities[(i / 5) % 5], "today"};
    out.push_back(align_tags(encode_query(i % 2 ? "Person" : "Location", body),
                             std::vector<TokenRange>{i % 2 ? TokenRange{0, 1} : TokenRange{2, 3}}));
  }
  return out;
}

DistillRecord record(std::string id, std::string text, std::vector<std::pair<std::string, TokenRange>> pairs) {
  DistillRecord r;
  r.sentence = make_sentence(std::move(id), std::move(text));
  for (auto& [l, range] : pairs) r.pairs.push_back({l, "", range});
  return r;
}

}  // namespace

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK(c.learning_rate == 2e-5);
  CHECK(c.batch_size == 64);
  CHECK(c.epochs == 1);
  CHECK(c.schedule == "cosine");
  CHECK_NOTHROW(c.validate());
  for (auto mutate : std::vector<std::function<void(TrainConfig&)>>{
           [](TrainConfig& x) { x.learning_rate = 0; }, [](TrainConfig& x) { x.batch_size = 0; },
           [](TrainConfig& x) { x.epochs = 0; }, [](TrainConfig& x) { x.optimizer = "sgd"; },
           [](TrainConfig& x) { x.schedule = "linear"; }, [](TrainConfig& x) { x.beta2 = 1.0; }}) {
    TrainConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("cosine schedule") {
  CHECK(cosine_learning_rate(1.0, 0, 10) == 1.0);
  CHECK(cosine_learning_rate(1.0, 5, 10) == doctest::Approx(0.5));
  CHECK(cosine_learning_rate(2.0, 10, 10) == doctest::Approx(0.0));
  for (std::size_t s = 1; s < 100; ++s) CHECK(cosine_learning_rate(1, s, 100) < cosine_learning_rate(1, s - 1, 100));
}

TEST_CASE("fit_tagger batches ceil(N / batch) per epoch and visits every example once") {
  for (std::size_t n : {1, 63, 64, 65, 128, 200}) {
    Recorder r;
    const auto ex = plain_examples(n);
    TrainConfig c;
    c.epochs = 2;
    const auto log = fit_tagger(r, ex, c);
    const auto per_epoch = (n + 63) / 64;
    CHECK(r.total_steps == 2 * per_epoch);
    CHECK(log.batches.size() == 2 * per_epoch);
    CHECK(r.sizes.size() == 2 * per_epoch);
    for (std::size_t i = 0; i + 1 < per_epoch; ++i) CHECK(r.sizes[i] == 64);
    std::vector<const TaggedExample*> first(r.seen.begin(), r.seen.begin() + static_cast<long>(n));
    std::sort(first.begin(), first.end());
    CHECK(std::adjacent_find(first.begin(), first.end()) == first.end());
    CHECK(first.size() == n);
    for (std::size_t s = 0; s < r.rates.size(); ++s) {
      CHECK(r.rates[s] == doctest::Approx(cosine_learning_rate(2e-5, s, 2 * per_epoch)));
      CHECK(log.batches[s].step == s);
      CHECK(log.batches[s].epoch == s / per_epoch);
    }
  }
  Recorder r;
  CHECK_THROWS_AS(fit_tagger(r, std::span<const TaggedExample>{}, TrainConfig{}), std::invalid_argument);
  auto untagged = encode_query("X", Tokens{"a"});
  CHECK_THROWS_AS(fit_tagger(r, std::span(&untagged, 1), TrainConfig{}), std::invalid_argument);
}

TEST_CASE("fit_tagger shuffling is seeded") {
  const auto ex = plain_examples(100);
  auto order = [&](std::uint64_t seed) {
    Recorder r;
    TrainConfig c;
    c.seed = seed;
    fit_tagger(r, ex, c);
    std::vector<std::ptrdiff_t> o;
    for (auto* p : r.seen) o.push_back(p - ex.data());
    return o;
  };
  CHECK(order(1) == order(1));
  CHECK(order(1) != order(2));
}

TEST_CASE("toy tagger loss falls on a separable toy task") {
  const auto ex = separable_examples(50);
  ToyTagger tagger({14, 2});
  TrainConfig c;
  c.learning_rate = 0.05;
  c.batch_size = 8;
  c.epochs = 15;
  const auto log = fit_tagger(tagger, ex, c);
  const double first = log.batches.front().loss;
  const double last = log.batches.back().loss;
  CHECK(first == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(last < 0.25 * first);
  for (const auto& e : ex) {
    std::vector<Tag> got;
    for (const auto& p : tagger.predict(e)) got.push_back(argmax_tag(p));
    CHECK(got == e.tags);
  }
}

TEST_CASE("toy tagger predictions are normalized distributions") {
  gen::Engine e(31);
  ToyTagger tagger({12, 2});
  TrainConfig c;
  c.learning_rate = 0.1;
  c.batch_size = 4;
  fit_tagger(tagger, separable_examples(20), c);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = encode_query(gen::label(e), gen::sentence(e, 0, 15));
    const auto d = tagger.predict(q);
    CHECK(d.size() == q.body_tokens.size());
    CHECK_NOTHROW(check_distribution(d));
  }
}

TEST_CASE("toy tagger checkpoints round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "spandistill-toy-test";
  std::filesystem::create_directories(dir);
  ToyTagger tagger({12, 1});
  TrainConfig c;
  c.learning_rate = 0.05;
  c.batch_size = 8;
  fit_tagger(tagger, separable_examples(30), c);
  tagger.save(dir / "m.bin");
  const auto loaded = ToyTagger::load(dir / "m.bin");
  CHECK(loaded.options().hash_bits == 12);
  CHECK(loaded.options().window == 1);
  CHECK(loaded.weights() == tagger.weights());
  const auto q = separable_examples(3)[2];
  CHECK(loaded.predict(q) == tagger.predict(q));

  CHECK_THROWS_AS(ToyTagger::load(dir / "missing.bin"), DataError);
  {
    std::ofstream out(dir / "junk.bin", std::ios::binary);
    out << "not a model";
  }
  CHECK_THROWS_AS(ToyTagger::load(dir / "junk.bin"), DataError);
  {
    const auto full = std::filesystem::file_size(dir / "m.bin");
    std::filesystem::copy_file(dir / "m.bin", dir / "cut.bin", std::filesystem::copy_options::overwrite_existing);
    std::filesystem::resize_file(dir / "cut.bin", full / 2);
  }
  CHECK_THROWS_AS(ToyTagger::load(dir / "cut.bin"), DataError);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(ToyTagger({2, 1}), std::invalid_argument);
}

TEST_CASE("distill_to_training") {
  const std::vector<DistillRecord> records = {
      record("a", "John Smith met Anna in Paris", {{"Person", {0, 2}}, {"Person", {4, 5}}, {"Place", {5, 6}}}),
      record("b", "New York is big", {{"City", {0, 2}}, {"City", {1, 2}}}),
      record("c", "Nothing here", {}),
  };
  DistillExampleStats st;
  const auto ex = distill_to_training(records, 1, 7, &st);
  CHECK(st.positives == 3);
  CHECK(st.overlapping_spans_dropped == 1);
  CHECK(st.negatives == 3);
  REQUIRE(ex.size() == 6);
  CHECK(ex[0].label == "Person");
  CHECK(decode_spans(ex[0].tags) == std::vector<TokenRange>{{0, 2}, {4, 5}});
  CHECK(ex[1].label == "Place");
  CHECK(ex[2].label != "Person");
  CHECK(ex[2].label != "Place");
  CHECK(decode_spans(ex[2].tags).empty());
  CHECK(decode_spans(ex[3].tags) == std::vector<TokenRange>{{0, 2}});
  CHECK(ex == distill_to_training(records, 1, 7));

  DistillExampleStats none;
  CHECK(distill_to_training(records, 0, 7, &none).size() == 3);
  CHECK(none.negatives == 0);
  CHECK(distill_to_training(records, 10, 7, &none).size() == 3 + 1 + 2 + 3);
}

TEST_CASE("distill_to_training only emits valid BIO sequences") {
  RuleBasedMockClient client;
  SynthOptions o;
  o.n = 400;
  const auto synth = synthesize(paragraphs_from(synthetic_corpus(500, 8)), client, o);
  DistillExampleStats st;
  const auto ex = distill_to_training(synth.records, 2, 3, &st);
  CHECK(st.positives > 0);
  CHECK(st.negatives > 0);
  for (const auto& x : ex) {
    REQUIRE(x.tags.size() == x.body_tokens.size());
    CHECK(is_valid_bio(x.tags));
  }
}

TEST_CASE("toy tagger memorizes a repeated example") {
  gen::Engine e(33);
  TrainConfig c;
  c.learning_rate = 0.05;
  c.batch_size = 16;
  c.epochs = 3;
  for (int trial = 0; trial < 60; ++trial) {
    const auto body = gen::sentence(e, 1, 25);
    const auto ex = align_tags(encode_query(gen::label(e), body), gen::disjoint_spans(e, body.size()));
    const std::vector<TaggedExample> copies(gen::uniform(e, 50, 120), ex);
    ToyTagger t({18, 2});
    fit_tagger(t, copies, c);
    const auto d = t.predict(ex);
    REQUIRE(d.size() == ex.tags.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(argmax_tag(d[i]) == ex.tags[i]);
  }
}

TEST_CASE("generative formats round-trip") {
  gen::Engine e(32);
  for (int trial = 0; trial < 1000; ++trial) {
    auto body = gen::sentence(e, 1, 12);
    const auto ex = align_tags(encode_query(gen::label(e), body), gen::disjoint_spans(e, body.size()));
    const auto want = label_spans(ex);
    const auto s2s = convert_seq2seq(ex);
    CHECK(s2s.input.rfind(ex.label + ": ", 0) == 0);
    CHECK(parse_seq2seq(s2s) == want);
    const auto causal = convert_causal(ex);
    CHECK(causal.target_begin < causal.target_end);
    CHECK(causal.target_end == causal.text.size());
    CHECK(causal.text.substr(causal.target_begin) == s2s.target + std::string(kEndOfText));
    CHECK(parse_causal(causal.text) == want);
    if (want.spans.empty()) CHECK(s2s.target == kNoSpans);
  }
  const auto ex = align_tags(encode_query("Location", tokenize("John Smith loves his hometown, Los Angeles")),
                             std::vector<TokenRange>{{6, 8}});
  CHECK(convert_seq2seq(ex).target == "Los Angeles");
  CHECK(convert_causal(ex).text == "John Smith loves his hometown , Los Angeles\nLocation: Los Angeles<|endoftext|>");
  CHECK_THROWS_AS(parse_causal("no newline"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seq2seq({"missing separator", "x"}), std::invalid_argument);
}
