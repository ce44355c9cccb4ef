// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/model_harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "spandistill/rng.hpp"
#include "spandistill/text.hpp"

namespace spandistill {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (optimizer != "adamw") throw std::invalid_argument("unsupported optimizer '" + optimizer + "'");
  if (schedule != "cosine" && schedule != "constant")
    throw std::invalid_argument("unsupported schedule '" + schedule + "'");
}

double cosine_learning_rate(double base, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0) return base;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return base * 0.5 * (1.0 + std::cos(M_PI * progress));
}

TrainingLog fit_tagger(Tagger& tagger, std::span<const TaggedExample> examples,
                       const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw std::invalid_argument("fit_tagger: no training examples");
  for (const auto& ex : examples) {
    if (ex.tags.size() != ex.body_tokens.size())
      throw std::invalid_argument("fit_tagger: example '" + ex.label + "' is not tagged");
  }

  const std::size_t per_epoch = (examples.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = per_epoch * config.epochs;
  tagger.begin_training(config, total_steps);

  TrainingLog log;
  log.examples = examples.size();
  log.epochs = config.epochs;
  log.batch_size = config.batch_size;

  Rng rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::vector<const TaggedExample*> batch;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (auto k = start; k < end; ++k) batch.push_back(&examples[order[k]]);
      const double lr = config.schedule == "cosine"
                            ? cosine_learning_rate(config.learning_rate, step, total_steps)
                            : config.learning_rate;
      const double loss = tagger.train_batch(batch, lr);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("training diverged: non-finite loss at step " +
                                 std::to_string(step));
      }
      log.batches.push_back({epoch, step, batch.size(), lr, loss});
      ++step;
    }
  }
  return log;
}

std::vector<TaggedExample> distill_to_training(std::span<const DistillRecord> records,
                                               std::size_t negatives_per_record,
                                               std::uint64_t seed, DistillExampleStats* stats) {
  DistillExampleStats local;
  std::set<std::string> pool_set;
  for (const auto& r : records) {
    for (const auto& p : r.pairs) {
      if (p.range) pool_set.insert(p.label);
    }
  }
  const std::vector<std::string> pool(pool_set.begin(), pool_set.end());

  Rng rng(seed);
  std::vector<TaggedExample> out;
  for (const auto& record : records) {
    // Labels in order of first appearance.
    std::vector<std::string> labels;
    std::map<std::string, std::vector<TokenRange>> spans;
    for (const auto& p : record.pairs) {
      if (!p.range) continue;
      if (!spans.contains(p.label)) labels.push_back(p.label);
      spans[p.label].push_back(*p.range);
    }
    for (const auto& label : labels) {
      auto& ranges = spans[label];
      std::sort(ranges.begin(), ranges.end(), [](const TokenRange& a, const TokenRange& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.size() > b.size();
      });
      std::vector<TokenRange> kept;
      for (const auto& r : ranges) {
        if (!kept.empty() && kept.back().overlaps(r)) {
          ++local.overlapping_spans_dropped;
          continue;
        }
        kept.push_back(r);
      }
      out.push_back(align_tags(encode_query(label, record.sentence.tokens), kept));
      ++local.positives;
    }

    std::vector<std::string> candidates;
    for (const auto& l : pool) {
      if (!spans.contains(l)) candidates.push_back(l);
    }
    const auto take = std::min(negatives_per_record, candidates.size());
    for (const auto i : rng.sample_indices(candidates.size(), take)) {
      out.push_back(align_tags(encode_query(candidates[i], record.sentence.tokens), {}));
      ++local.negatives;
    }
  }
  if (stats) *stats = local;
  return out;
}

LabelSpans label_spans(const TaggedExample& example) {
  if (example.tags.size() != example.body_tokens.size())
    throw std::invalid_argument("label_spans: example is not tagged");
  LabelSpans out{example.label, {}};
  const std::span<const std::string> body(example.body_tokens);
  for (const auto& r : decode_spans(example.tags)) {
    out.spans.push_back(join(body.subspan(r.begin, r.size()), " "));
  }
  return out;
}

namespace {

std::string target_text(const LabelSpans& ls) {
  if (ls.spans.empty()) return std::string(kNoSpans);
  return join(ls.spans, kSpanJoiner);
}

std::vector<std::string> split_target(std::string_view target) {
  if (target == kNoSpans) return {};
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = target.find(kSpanJoiner, start);
    out.emplace_back(target.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + kSpanJoiner.size();
  }
  return out;
}

}  // namespace

Seq2SeqPair convert_seq2seq(const TaggedExample& example) {
  const auto ls = label_spans(example);
  return {example.label + ": " + join(example.body_tokens, " "), target_text(ls)};
}

CausalSample convert_causal(const TaggedExample& example, std::string_view end_of_text) {
  const auto ls = label_spans(example);
  CausalSample s;
  s.text = join(example.body_tokens, " ") + "\n" + example.label + ": ";
  s.target_begin = s.text.size();
  s.text += target_text(ls);
  s.text += end_of_text;
  s.target_end = s.text.size();
  return s;
}

LabelSpans parse_seq2seq(const Seq2SeqPair& pair) {
  const auto sep = pair.input.find(": ");
  if (sep == std::string::npos || sep == 0)
    throw std::invalid_argument("parse_seq2seq: input lacks a '<label>: ' prefix");
  return {pair.input.substr(0, sep), split_target(pair.target)};
}

LabelSpans parse_causal(std::string_view text, std::string_view end_of_text) {
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) throw std::invalid_argument("parse_causal: missing newline");
  auto rest = text.substr(nl + 1);
  if (!end_of_text.empty()) {
    if (rest.size() < end_of_text.size() ||
        rest.substr(rest.size() - end_of_text.size()) != end_of_text)
      throw std::invalid_argument("parse_causal: missing end-of-text marker");
    rest.remove_suffix(end_of_text.size());
  }
  const auto sep = rest.find(": ");
  if (sep == std::string_view::npos || sep == 0)
    throw std::invalid_argument("parse_causal: missing '<label>: '");
  return {std::string(rest.substr(0, sep)), split_target(rest.substr(sep + 2))};
}

}  // namespace spandistill
