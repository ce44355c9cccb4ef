// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spandistill {

std::string trim(std::string_view s);

/// Trims and collapses every internal whitespace run to a single space.
std::string collapse_whitespace(std::string_view s);

/// Label normalization applied everywhere a label enters the toolkit.
inline std::string normalize_label(std::string_view s) { return collapse_whitespace(s); }

std::string ascii_lower(std::string_view s);

/// Number of whitespace-separated words.
std::size_t count_words(std::string_view s);

/// Whitespace/punctuation tokenizer.
///
/// A token is either a run of word characters (ASCII alphanumerics and any
/// non-punctuation UTF-8 sequence) or a single punctuation character. Inside a
/// word, an apostrophe or hyphen between two word characters is kept, as is a
/// '.' or ',' between two digits ("don't", "state-of-the-art", "3.5", "1,000").
/// No non-whitespace byte is ever dropped, so concatenating the tokens gives
/// back the input with its whitespace removed.
std::vector<std::string> tokenize(std::string_view text);

/// Rebuilds readable text from tokens: single spaces, no space before closing
/// punctuation and none after opening brackets.
std::string detokenize(std::span<const std::string> tokens);

std::string join(std::span<const std::string> parts, std::string_view sep);

/// True when both sequences have the same length and pairwise equal tokens.
bool tokens_equal(std::span<const std::string> a, std::span<const std::string> b,
                  bool case_sensitive);

/// First sentence of a paragraph.
///
/// A boundary is terminal punctuation (. ! ?), optionally followed by closing
/// quotes or brackets, then whitespace, then an uppercase letter or an opening
/// quote. A period after a known abbreviation or a single capital initial is
/// not a boundary. Without any boundary the whole (trimmed) paragraph is
/// returned.
std::string first_sentence(std::string_view paragraph);

}  // namespace spandistill
