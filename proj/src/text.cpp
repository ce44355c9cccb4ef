// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace spandistill {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return std::isspace(static_cast<int>(cp)) != 0;
  return cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
  return (cp >= 0x00A1 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003);
}

bool is_word(char32_t cp) { return !is_space(cp) && !is_punct(cp); }
bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_closing(std::string_view tok) {
  static constexpr std::array<std::string_view, 13> kClosing = {
      ".", ",", ";", ":", "!", "?", ")", "]", "}", "%", "\xE2\x80\x9D", "\xE2\x80\x99",
      "\xE2\x80\xA6"};
  return std::find(kClosing.begin(), kClosing.end(), tok) != kClosing.end();
}

bool is_opening(std::string_view tok) {
  return tok == "(" || tok == "[" || tok == "{" || tok == "$" || tok == "\xE2\x80\x9C" ||
         tok == "\xE2\x80\x98";
}

}  // namespace

std::string trim(std::string_view s) {
  const auto* ws = " \t\n\r\f\v";
  const auto start = s.find_first_not_of(ws);
  if (start == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return std::string(s.substr(start, end - start + 1));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t count_words(std::string_view s) {
  std::size_t words = 0;
  bool in_word = false;
  for (const char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  char32_t last = 0;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto cp = decode(text, i);
    const auto bytes = text.substr(i, cp.length);
    if (is_space(cp.value)) {
      flush();
    } else if (is_punct(cp.value)) {
      bool joins = false;
      const std::size_t next = i + cp.length;
      if (!current.empty() && next < text.size()) {
        const auto ahead = decode(text, next).value;
        const bool inner = cp.value == U'\'' || cp.value == U'-' || cp.value == 0x2019;
        joins = (inner && is_word(last) && is_word(ahead)) ||
                ((cp.value == U'.' || cp.value == U',') && is_digit(last) && is_digit(ahead));
      }
      if (joins) {
        current.append(bytes);
        last = cp.value;
      } else {
        flush();
        out.emplace_back(bytes);
      }
    } else {
      current.append(bytes);
      last = cp.value;
    }
    i += cp.length;
  }
  flush();
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  bool no_space_next = true;
  bool quote_open = false;
  for (const auto& tok : tokens) {
    bool attach = no_space_next || is_closing(tok);
    no_space_next = false;
    if (tok == "\"") {
      if (quote_open) {
        attach = true;
      } else {
        no_space_next = true;
      }
      quote_open = !quote_open;
    }
    if (!attach) out.push_back(' ');
    out += tok;
    if (is_opening(tok)) no_space_next = true;
  }
  return out;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool tokens_equal(std::span<const std::string> a, std::span<const std::string> b,
                  bool case_sensitive) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (case_sensitive ? a[i] != b[i] : ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  }
  return true;
}

std::string first_sentence(std::string_view paragraph) {
  const std::string text = trim(paragraph);
  static constexpr std::array<std::string_view, 22> kAbbreviations = {
      "Mr", "Mrs", "Ms", "Dr", "Prof", "Sr", "Jr", "St", "Gen", "Gov", "Sen",
      "Rep", "Lt", "Col", "Capt", "Mt", "No", "vs", "Sgt", "Rev", "Hon", "Fr"};

  auto closing_at = [&](std::size_t j) -> std::size_t {
    const char c = text[j];
    if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
    if (text.compare(j, 3, "\xE2\x80\x9D") == 0 || text.compare(j, 3, "\xE2\x80\x99") == 0) return 3;
    return 0;
  };
  auto starts_sentence = [&](std::size_t k) {
    const auto c = static_cast<unsigned char>(text[k]);
    if (std::isupper(c) || c == '"' || c == '\'' || c == '(') return true;
    if (text.compare(k, 3, "\xE2\x80\x9C") == 0 || text.compare(k, 3, "\xE2\x80\x98") == 0)
      return true;
    // Latin-1 supplement capitals (U+00C0..U+00DE) encode as C3 80..C3 9E.
    return c == 0xC3 && k + 1 < text.size() &&
           static_cast<unsigned char>(text[k + 1]) >= 0x80 &&
           static_cast<unsigned char>(text[k + 1]) <= 0x9E;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > 0 && std::isalpha(static_cast<unsigned char>(text[w - 1]))) --w;
      const std::string_view word(text.data() + w, i - w);
      if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) continue;
      if (std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end())
        continue;
    }
    std::size_t j = i + 1;
    while (j < text.size()) {
      const auto len = closing_at(j);
      if (len == 0) break;
      j += len;
    }
    if (j >= text.size() || !std::isspace(static_cast<unsigned char>(text[j]))) continue;
    std::size_t k = j;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && starts_sentence(k)) return text.substr(0, j);
  }
  return text;
}

}  // namespace spandistill
