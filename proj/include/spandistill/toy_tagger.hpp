// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "spandistill/model_harness.hpp"

namespace spandistill {

struct ToyTaggerOptions {
  unsigned hash_bits = 18;  // feature table has 2^hash_bits rows
  unsigned window = 2;      // context words on each side
};

/// Desk-scale stand-in for a pretrained encoder: a per-token three-way
/// logistic classifier over hashed features. Features cover the word, its
/// shape and affixes, a context window, and conjunctions of each query label
/// token with the local features, which is what lets one model answer
/// arbitrary label queries.
///
/// Trained with AdamW using lazy (touched-rows-only) moment and decay
/// updates. Optimizer state is reset by begin_training and not persisted.
class ToyTagger final : public Tagger {
 public:
  explicit ToyTagger(ToyTaggerOptions options = {});

  TagDistribution predict(const TaggedExample& query) const override;
  void begin_training(const TrainConfig& config, std::size_t total_steps) override;
  double train_batch(std::span<const TaggedExample* const> batch, double learning_rate) override;
  std::string kind() const override { return "toy"; }
  std::unique_ptr<Tagger> clone() const override { return std::make_unique<ToyTagger>(*this); }

  const ToyTaggerOptions& options() const { return options_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Binary checkpoint of the options and non-zero weights.
  void save(const std::filesystem::path& path) const;
  /// Throws DataError on a missing or corrupt checkpoint.
  static ToyTagger load(const std::filesystem::path& path);

  /// Hashed feature ids for every body token of `example`.
  std::vector<std::vector<std::uint32_t>> features(const TaggedExample& example) const;

 private:
  ToyTaggerOptions options_;
  std::uint32_t mask_ = 0;
  std::vector<double> weights_;  // row-major [feature][B, I, O]
  std::vector<double> m_;
  std::vector<double> v_;
  TrainConfig config_;
  std::uint64_t step_ = 0;
};

}  // namespace spandistill
