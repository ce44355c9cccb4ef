// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/distill_synth.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "spandistill/error.hpp"
#include "spandistill/rng.hpp"
#include "spandistill/text.hpp"

namespace spandistill {

SourceSentence make_sentence(std::string id, std::string text, std::string origin) {
  SourceSentence s{std::move(id), std::move(text), {}, std::move(origin)};
  s.tokens = tokenize(s.text);
  if (s.tokens.empty()) throw std::invalid_argument("sentence has no tokens: '" + s.text + "'");
  return s;
}

ParagraphSource paragraphs_from_stream(std::istream& in) {
  return [&in]() -> std::optional<std::string> {
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
}

ParagraphSource paragraphs_from(std::span<const std::string> paragraphs) {
  return [paragraphs, i = std::size_t{0}]() mutable -> std::optional<std::string> {
    if (i >= paragraphs.size()) return std::nullopt;
    return paragraphs[i++];
  };
}

SampleResult sample_sentences(const ParagraphSource& source, std::size_t n,
                              std::string_view corpus_name) {
  SampleResult result;
  std::unordered_set<std::string> seen;
  while (result.sentences.size() < n) {
    auto paragraph = source();
    if (!paragraph) {
      result.exhausted = true;
      break;
    }
    const std::size_t offset = result.paragraphs_read++;
    std::string sentence = first_sentence(*paragraph);
    if (sentence.empty()) continue;
    if (!seen.insert(sentence).second) {
      ++result.duplicates_skipped;
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof id, "-%08zu", result.sentences.size());
    result.sentences.push_back(make_sentence(std::string(corpus_name) + id, std::move(sentence),
                                             std::string(corpus_name) + ":" +
                                                 std::to_string(offset)));
  }
  return result;
}

std::string build_prompt(const SourceSentence& sentence) {
  if (sentence.text.empty()) throw std::invalid_argument("build_prompt: empty sentence");
  std::string prompt =
      "Read the sentence below and extract all of the important information it contains.\n"
      "Write one piece of information per line, using exactly this format:\n"
      "- Label: Span\n"
      "The label is a short free-form description of the type of information. The span must "
      "be copied word for word from the sentence. If several spans share a label, list them on "
      "one line separated by commas.\n"
      "\n"
      "Sentence: ";
  prompt += sentence.text;
  prompt += "\n";
  return prompt;
}

std::vector<std::string> split_conjunctions(std::string_view span_text) {
  static constexpr std::array<std::string_view, 4> kDelimiters = {", ", "; ", " and ", " or "};
  std::vector<std::string> pieces;
  auto emit = [&](std::string_view piece) {
    auto t = trim(piece);
    if (!t.empty()) pieces.push_back(std::move(t));
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < span_text.size()) {
    std::size_t matched = 0;
    for (const auto d : kDelimiters) {
      if (span_text.substr(i, d.size()) == d) {
        matched = d.size();
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    emit(span_text.substr(start, i - start));
    i += matched;
    start = i;
  }
  emit(span_text.substr(start));
  return pieces;
}

ParseResult parse_llm_response(std::string_view response) {
  ParseResult out;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    auto nl = response.find('\n', pos);
    if (nl == std::string_view::npos) nl = response.size();
    const std::string line = trim(response.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (line.front() != '-' || colon == std::string::npos) {
      ++out.unmatched_lines;
      continue;
    }
    std::string label = normalize_label(std::string_view(line).substr(1, colon - 1));
    const std::string span = trim(std::string_view(line).substr(colon + 1));
    if (label.empty() || span.empty()) {
      ++out.unmatched_lines;
      continue;
    }
    ++out.matched_lines;
    for (auto& piece : split_conjunctions(span)) {
      out.pairs.push_back({label, std::move(piece), std::nullopt});
    }
  }
  return out;
}

std::optional<TokenRange> align_span(std::span<const std::string> sentence_tokens,
                                     std::string_view span_text) {
  const auto needle = tokenize(span_text);
  if (needle.empty() || needle.size() > sentence_tokens.size()) return std::nullopt;
  for (const bool case_sensitive : {true, false}) {
    for (std::size_t i = 0; i + needle.size() <= sentence_tokens.size(); ++i) {
      if (tokens_equal(sentence_tokens.subspan(i, needle.size()), needle, case_sensitive))
        return TokenRange{i, i + needle.size()};
    }
  }
  return std::nullopt;
}

SynthDiagnostics& SynthDiagnostics::operator+=(const SynthDiagnostics& o) {
  sentences += o.sentences;
  failed_records += o.failed_records;
  retries += o.retries;
  matched_lines += o.matched_lines;
  unmatched_lines += o.unmatched_lines;
  pairs_parsed += o.pairs_parsed;
  pairs_unaligned += o.pairs_unaligned;
  pairs_duplicate += o.pairs_duplicate;
  pairs_kept += o.pairs_kept;
  corpus_exhausted = corpus_exhausted || o.corpus_exhausted;
  return *this;
}

DistillRecord annotate_sentence(const SourceSentence& sentence, std::string response,
                                SynthDiagnostics* diagnostics) {
  SynthDiagnostics local;
  DistillRecord record{sentence, {}, std::move(response), std::nullopt};
  auto parsed = parse_llm_response(record.raw_response);
  local.matched_lines = parsed.matched_lines;
  local.unmatched_lines = parsed.unmatched_lines;
  local.pairs_parsed = parsed.pairs.size();

  std::set<std::pair<std::string, TokenRange>> seen;
  for (auto& pair : parsed.pairs) {
    pair.range = align_span(sentence, pair.span_text);
    if (!pair.range) {
      ++local.pairs_unaligned;
      continue;
    }
    if (!seen.emplace(pair.label, *pair.range).second) {
      ++local.pairs_duplicate;
      continue;
    }
    record.pairs.push_back(std::move(pair));
  }
  local.pairs_kept = record.pairs.size();
  local.sentences = 1;
  if (diagnostics) *diagnostics += local;
  return record;
}

SynthResult synthesize(const ParagraphSource& source, LlmClient& client,
                       const SynthOptions& options) {
  auto sample = sample_sentences(source, options.n, options.corpus_name);
  const auto& sentences = sample.sentences;

  SynthResult result;
  result.records.resize(sentences.size());
  result.diagnostics.corpus_exhausted = sample.exhausted;

  std::atomic<std::size_t> next{0};
  std::mutex diag_mutex;
  auto worker = [&] {
    SynthDiagnostics local;
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      const auto& sentence = sentences[i];
      auto outcome = complete_with_retry(client, build_prompt(sentence), options.retry);
      if (outcome.attempts > 1) local.retries += outcome.attempts - 1;
      if (outcome.error) {
        result.records[i] = DistillRecord{sentence, {}, {}, std::move(outcome.error)};
        ++local.failed_records;
        ++local.sentences;
        continue;
      }
      result.records[i] = annotate_sentence(sentence, std::move(outcome.text), &local);
    }
    std::lock_guard lock(diag_mutex);
    result.diagnostics += local;
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(options.parallelism, sentences.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const DistillRecord& a, const DistillRecord& b) {
                     return a.sentence.id < b.sentence.id;
                   });
  return result;
}

LabelStats label_stats(std::span<const DistillRecord> records, std::size_t top_k) {
  static constexpr std::array<std::string_view, 5> kNames = {"1-gram", "2-gram", "3-gram",
                                                             "4-gram", ">=5-gram"};
  std::array<std::map<std::string, std::size_t>, 5> counts;
  LabelStats stats;
  for (const auto& record : records) {
    for (const auto& pair : record.pairs) {
      const auto words = count_words(pair.label);
      if (words == 0) continue;
      ++counts[std::min<std::size_t>(words, 5) - 1][pair.label];
      ++stats.total;
    }
  }
  for (std::size_t b = 0; b < 5; ++b) {
    auto& bucket = stats.buckets[b];
    bucket.name = kNames[b];
    bucket.distinct = counts[b].size();
    for (const auto& [label, count] : counts[b]) bucket.total += count;
    for (const auto& [label, count] : counts[b]) {
      bucket.entries.push_back(
          {label, count, static_cast<double>(count) / static_cast<double>(bucket.total)});
    }
    std::stable_sort(bucket.entries.begin(), bucket.entries.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    if (top_k > 0 && bucket.entries.size() > top_k) bucket.entries.resize(top_k);
  }
  return stats;
}

std::vector<DistillRecord> subsample(std::span<const DistillRecord> records, std::size_t k,
                                     std::uint64_t seed) {
  if (k > records.size()) {
    throw std::invalid_argument("subsample: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(records.size()) + " records");
  }
  Rng rng(seed);
  std::vector<DistillRecord> out;
  out.reserve(k);
  for (const auto i : rng.sample_indices(records.size(), k)) out.push_back(records[i]);
  return out;
}

}  // namespace spandistill
