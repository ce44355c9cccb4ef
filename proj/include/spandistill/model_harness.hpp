// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spandistill/distill_synth.hpp"
#include "spandistill/label_span_codec.hpp"

namespace spandistill {

/// Optimizer and schedule settings. The defaults are the few-shot fine-tuning
/// recipe for a large pretrained encoder: AdamW at 2e-5 with cosine annealing
/// (no warmup), batch size 64, one epoch. Weight decay and the Adam moments
/// are not part of that recipe and use common AdamW values.
struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t batch_size = 64;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::string optimizer = "adamw";
  std::string schedule = "cosine";

  /// Throws std::invalid_argument on a non-positive rate, batch size or epoch
  /// count, or an unsupported optimizer/schedule name.
  void validate() const;
};

/// Cosine annealing from `base` toward zero over `total_steps` steps.
double cosine_learning_rate(double base, std::size_t step, std::size_t total_steps);

/// A query-conditioned BIO tagger.
///
/// predict() returns one normalized (B, I, O) triple per body token and must
/// be safe to call concurrently. Training goes through fit_tagger(), which
/// owns the batching, shuffling and schedule and calls begin_training() once
/// followed by train_batch() per batch.
class Tagger {
 public:
  virtual ~Tagger() = default;

  virtual TagDistribution predict(const TaggedExample& query) const = 0;
  virtual void begin_training(const TrainConfig& config, std::size_t total_steps) = 0;
  /// One optimizer step; returns the mean per-token cross-entropy of the batch
  /// measured before the update.
  virtual double train_batch(std::span<const TaggedExample* const> batch, double learning_rate) = 0;
  virtual std::string kind() const = 0;
  virtual std::unique_ptr<Tagger> clone() const = 0;
};

struct BatchLogEntry {
  std::size_t epoch = 0;
  std::size_t step = 0;
  std::size_t size = 0;
  double learning_rate = 0.0;
  double loss = 0.0;
};

struct TrainingLog {
  std::size_t examples = 0;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::vector<BatchLogEntry> batches;
};

/// Trains `tagger` in place for config.epochs passes over shuffled batches.
/// Throws std::invalid_argument for an empty example list or a bad config and
/// std::runtime_error if the loss stops being finite.
TrainingLog fit_tagger(Tagger& tagger, std::span<const TaggedExample> examples,
                       const TrainConfig& config);

struct DistillExampleStats {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t overlapping_spans_dropped = 0;
};

/// Converts distillation records to tagged examples: one positive example per
/// (record, label) carrying all of that label's spans, then up to
/// `negatives_per_record` all-O examples per record whose labels are drawn
/// from the global label pool minus the record's own labels.
///
/// BIO cannot express overlapping spans under one label; among overlapping
/// spans the one starting first (longer on ties) is kept.
std::vector<TaggedExample> distill_to_training(std::span<const DistillRecord> records,
                                               std::size_t negatives_per_record,
                                               std::uint64_t seed,
                                               DistillExampleStats* stats = nullptr);

// Text formats for generative students. The target lists span texts (body
// tokens joined by single spaces) in sentence order, joined by "; ", or
// "NONE" when nothing is extracted. The inverse parsers assume the label
// itself contains no ": ".

inline constexpr std::string_view kSpanJoiner = "; ";
inline constexpr std::string_view kNoSpans = "NONE";
inline constexpr std::string_view kEndOfText = "<|endoftext|>";

struct Seq2SeqPair {
  std::string input;   // "<label>: <body>"
  std::string target;
};

struct CausalSample {
  std::string text;  // "<body>\n<label>: <target><eot>"
  // Loss mask: characters [target_begin, target_end) are trained on,
  // everything before is context.
  std::size_t target_begin = 0;
  std::size_t target_end = 0;
};

struct LabelSpans {
  std::string label;
  std::vector<std::string> spans;

  bool operator==(const LabelSpans&) const = default;
};

/// Span texts of a tagged example in sentence order.
LabelSpans label_spans(const TaggedExample& example);

Seq2SeqPair convert_seq2seq(const TaggedExample& example);
CausalSample convert_causal(const TaggedExample& example, std::string_view end_of_text = kEndOfText);

/// Throws std::invalid_argument on text that the converters cannot produce.
LabelSpans parse_seq2seq(const Seq2SeqPair& pair);
LabelSpans parse_causal(std::string_view text, std::string_view end_of_text = kEndOfText);

}  // namespace spandistill
