// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spandistill {

// Precondition violations throw std::invalid_argument. The two types below
// cover failures that originate outside the caller's arguments.

/// Malformed or inconsistent input data (bad JSONL line, unreadable file, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A remote service (the LLM endpoint) failed.
class UpstreamError : public std::runtime_error {
 public:
  UpstreamError(const std::string& what, bool transient)
      : std::runtime_error(what), transient_(transient) {}

  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

}  // namespace spandistill
