// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/toy_tagger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "spandistill/error.hpp"
#include "spandistill/hashing.hpp"
#include "spandistill/text.hpp"

namespace spandistill {
namespace {

constexpr char kMagic[8] = {'S', 'D', 'T', 'O', 'Y', '0', '0', '1'};

std::string shape(std::string_view w) {
  std::string out;
  for (const char ch : w) {
    const auto c = static_cast<unsigned char>(ch);
    char s = ch;
    if (std::isupper(c)) s = 'X';
    else if (std::islower(c)) s = 'x';
    else if (std::isdigit(c)) s = 'd';
    else if (c >= 0x80) s = 'u';
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

std::string affix(std::string_view w, std::size_t n, bool prefix) {
  if (w.size() <= n) return std::string(w);
  return std::string(prefix ? w.substr(0, n) : w.substr(w.size() - n));
}

void softmax(std::array<double, 3>& z) {
  const double mx = std::max({z[0], z[1], z[2]});
  double sum = 0.0;
  for (auto& x : z) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : z) x /= sum;
}

}  // namespace

ToyTagger::ToyTagger(ToyTaggerOptions options) : options_(options) {
  if (options_.hash_bits < 8 || options_.hash_bits > 26)
    throw std::invalid_argument("hash_bits must lie in [8, 26]");
  if (options_.window < 1 || options_.window > 5)
    throw std::invalid_argument("window must lie in [1, 5]");
  mask_ = (1u << options_.hash_bits) - 1;
  weights_.assign(static_cast<std::size_t>(mask_ + 1) * 3, 0.0);
}

std::vector<std::vector<std::uint32_t>> ToyTagger::features(const TaggedExample& example) const {
  const auto& body = example.body_tokens;
  const auto n = body.size();
  std::vector<std::string> lower(n), shapes(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = ascii_lower(body[i]);
    shapes[i] = shape(body[i]);
  }
  std::vector<std::string> query;
  for (const auto& t : example.prefix_tokens) {
    if (t != ":") query.push_back(ascii_lower(t));
  }
  const std::string whole = ascii_lower(example.label);

  auto word_at = [&](std::ptrdiff_t i) -> std::string {
    if (i < 0) return "<s>";
    if (i >= static_cast<std::ptrdiff_t>(n)) return "</s>";
    return lower[static_cast<std::size_t>(i)];
  };
  auto shape_at = [&](std::ptrdiff_t i) -> std::string {
    if (i < 0) return "<s>";
    if (i >= static_cast<std::ptrdiff_t>(n)) return "</s>";
    return shapes[static_cast<std::size_t>(i)];
  };

  std::vector<std::vector<std::uint32_t>> out(n);
  std::vector<std::string> local;
  for (std::size_t t = 0; t < n; ++t) {
    const auto i = static_cast<std::ptrdiff_t>(t);
    local.clear();
    local.push_back("w0=" + lower[t]);
    local.push_back("s0=" + shapes[t]);
    local.push_back("p3=" + affix(lower[t], 3, true));
    local.push_back("x3=" + affix(lower[t], 3, false));
    local.push_back("s-1=" + shape_at(i - 1));
    local.push_back("s+1=" + shape_at(i + 1));
    local.push_back("w-1|w0=" + word_at(i - 1) + "|" + lower[t]);
    for (unsigned d = 1; d <= options_.window; ++d) {
      local.push_back("w-" + std::to_string(d) + "=" + word_at(i - d));
      local.push_back("w+" + std::to_string(d) + "=" + word_at(i + d));
    }

    auto& ids = out[t];
    auto add = [&](std::string_view key) {
      ids.push_back(static_cast<std::uint32_t>(fnv1a64(key)) & mask_);
    };
    add("bias");
    for (const auto& f : local) add(f);
    // Query conjunctions: the whole label with the core features, each label
    // token with the core features and the immediate context.
    for (const auto& f : {std::string("bias"), local[0], local[1], local[4], local[7], local[8]}) {
      add("L=" + whole + "|" + f);
    }
    for (const auto& q : query) {
      for (const auto& f : {std::string("bias"), local[0], local[1], local[4], local[5], local[7],
                            local[8]}) {
        add("q=" + q + "|" + f);
      }
    }
  }
  return out;
}

TagDistribution ToyTagger::predict(const TaggedExample& query) const {
  const auto feats = features(query);
  TagDistribution dist(feats.size());
  for (std::size_t t = 0; t < feats.size(); ++t) {
    std::array<double, 3> z{0.0, 0.0, 0.0};
    for (const auto f : feats[t]) {
      for (std::size_t c = 0; c < 3; ++c) z[c] += weights_[f * 3 + c];
    }
    softmax(z);
    dist[t] = z;
  }
  return dist;
}

void ToyTagger::begin_training(const TrainConfig& config, std::size_t) {
  config.validate();
  config_ = config;
  m_.assign(weights_.size(), 0.0);
  v_.assign(weights_.size(), 0.0);
  step_ = 0;
}

double ToyTagger::train_batch(std::span<const TaggedExample* const> batch, double learning_rate) {
  if (m_.size() != weights_.size()) throw std::logic_error("train_batch before begin_training");
  std::unordered_map<std::uint32_t, std::array<double, 3>> grad;
  double loss = 0.0;
  std::size_t tokens = 0;
  for (const auto* ex : batch) tokens += ex->body_tokens.size();
  if (tokens == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(tokens);

  for (const auto* ex : batch) {
    const auto feats = features(*ex);
    for (std::size_t t = 0; t < feats.size(); ++t) {
      std::array<double, 3> z{0.0, 0.0, 0.0};
      for (const auto f : feats[t]) {
        for (std::size_t c = 0; c < 3; ++c) z[c] += weights_[f * 3 + c];
      }
      softmax(z);
      const auto gold = static_cast<std::size_t>(ex->tags[t]);
      loss -= std::log(std::max(z[gold], kProbabilityFloor));
      for (std::size_t c = 0; c < 3; ++c) z[c] = (z[c] - (c == gold ? 1.0 : 0.0)) * scale;
      for (const auto f : feats[t]) {
        auto& g = grad[f];
        for (std::size_t c = 0; c < 3; ++c) g[c] += z[c];
      }
    }
  }

  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (const auto& [f, g] : grad) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t k = f * 3 + c;
      m_[k] = b1 * m_[k] + (1.0 - b1) * g[c];
      v_[k] = b2 * v_[k] + (1.0 - b2) * g[c] * g[c];
      const double update = (m_[k] / bc1) / (std::sqrt(v_[k] / bc2) + config_.epsilon);
      weights_[k] -= learning_rate * (update + config_.weight_decay * weights_[k]);
    }
  }
  return loss * scale;
}

void ToyTagger::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write(kMagic, sizeof kMagic);
  put(static_cast<std::uint32_t>(options_.hash_bits));
  put(static_cast<std::uint32_t>(options_.window));
  std::uint64_t nonzero = 0;
  const std::size_t rows = weights_.size() / 3;
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights_[r * 3] != 0.0 || weights_[r * 3 + 1] != 0.0 || weights_[r * 3 + 2] != 0.0) ++nonzero;
  }
  put(nonzero);
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights_[r * 3] == 0.0 && weights_[r * 3 + 1] == 0.0 && weights_[r * 3 + 2] == 0.0) continue;
    put(static_cast<std::uint32_t>(r));
    for (std::size_t c = 0; c < 3; ++c) put(weights_[r * 3 + c]);
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

ToyTagger ToyTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  auto get = [&](auto& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("truncated checkpoint " + path.string());
  };
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw DataError(path.string() + " is not a toy tagger checkpoint");
  std::uint32_t bits = 0, window = 0;
  std::uint64_t count = 0;
  get(bits);
  get(window);
  get(count);
  ToyTagger tagger;
  try {
    tagger = ToyTagger({bits, window});
  } catch (const std::invalid_argument& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
  const std::size_t rows = tagger.weights_.size() / 3;
  if (count > rows) throw DataError("corrupt checkpoint " + path.string());
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t row = 0;
    get(row);
    if (row >= rows) throw DataError("corrupt checkpoint " + path.string());
    for (std::size_t c = 0; c < 3; ++c) get(tagger.weights_[row * 3 + c]);
  }
  return tagger;
}

}  // namespace spandistill
