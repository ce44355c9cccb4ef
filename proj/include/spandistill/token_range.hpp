// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>

namespace spandistill {

/// Half-open token interval [begin, end) into a sentence.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool overlaps(const TokenRange& o) const { return begin < o.end && o.begin < end; }

  auto operator<=>(const TokenRange&) const = default;
};

}  // namespace spandistill
