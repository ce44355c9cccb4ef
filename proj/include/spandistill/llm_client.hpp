// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>

namespace spandistill {

/// Prompt in, completion out. Implementations must be safe to call from
/// several threads at once and report failures as UpstreamError, marking
/// whether a retry may succeed.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

struct RetryPolicy {
  std::size_t max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
};

struct CompletionOutcome {
  std::string text;
  std::size_t attempts = 0;
  /// Set when the request failed for good; `text` is then empty.
  std::optional<std::string> error;
};

/// Calls the client, retrying transient failures with exponential backoff
/// until a permanent failure or `max_attempts` calls. Never throws for
/// client failures.
CompletionOutcome complete_with_retry(LlmClient& client, const std::string& prompt,
                                      const RetryPolicy& policy);

/// Decoding and endpoint settings for an OpenAI-compatible chat endpoint.
struct ChatClientConfig {
  std::string base_url = "https://api.openai.com";
  std::string endpoint = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_seconds = 60;
  std::string api_key;
};

/// Chat-completions client. HTTP 408, 429, 5xx and transport errors are
/// transient; every other non-2xx status and malformed bodies are permanent.
class ChatCompletionsClient final : public LlmClient {
 public:
  explicit ChatCompletionsClient(ChatClientConfig config);

  std::string complete(const std::string& prompt) override;
  std::string name() const override { return "chat:" + config_.model; }

  const ChatClientConfig& config() const { return config_; }

 private:
  ChatClientConfig config_;
};

}  // namespace spandistill
