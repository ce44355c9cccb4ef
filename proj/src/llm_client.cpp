// Copyright (c) 2026 The spandistill Authors
// SPDX-License-Identifier: Apache-2.0

#include "spandistill/llm_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <json.hpp>
#include <thread>

#include "spandistill/error.hpp"

namespace spandistill {

CompletionOutcome complete_with_retry(LlmClient& client, const std::string& prompt,
                                      const RetryPolicy& policy) {
  CompletionOutcome outcome;
  auto backoff = policy.initial_backoff;
  const std::size_t attempts = std::max<std::size_t>(1, policy.max_attempts);
  for (outcome.attempts = 1;; ++outcome.attempts) {
    try {
      outcome.text = client.complete(prompt);
      return outcome;
    } catch (const UpstreamError& e) {
      if (!e.transient()) {
        outcome.error = std::string("permanent failure: ") + e.what();
        return outcome;
      }
      if (outcome.attempts >= attempts) {
        outcome.error = "gave up after " + std::to_string(outcome.attempts) +
                        " attempts: " + e.what();
        return outcome;
      }
    } catch (const std::exception& e) {
      outcome.error = std::string("client error: ") + e.what();
      return outcome;
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(backoff * 2, policy.max_backoff);
  }
}

ChatCompletionsClient::ChatCompletionsClient(ChatClientConfig config) : config_(std::move(config)) {
  if (config_.api_key.empty()) throw std::invalid_argument("chat client: missing API key");
  if (config_.model.empty()) throw std::invalid_argument("chat client: missing model name");
}

std::string ChatCompletionsClient::complete(const std::string& prompt) {
  httplib::Client http(config_.base_url);
  http.set_connection_timeout(config_.timeout_seconds, 0);
  http.set_read_timeout(config_.timeout_seconds, 0);
  http.set_write_timeout(config_.timeout_seconds, 0);

  const nlohmann::json body = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature},
      {"max_tokens", config_.max_tokens},
  };
  const httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
  auto res = http.Post(config_.endpoint, headers, body.dump(), "application/json");
  if (!res) {
    throw UpstreamError("transport error: " + httplib::to_string(res.error()), true);
  }
  const int status = res->status;
  if (status < 200 || status >= 300) {
    const bool transient = status == 408 || status == 429 || status >= 500;
    throw UpstreamError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200),
                        transient);
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UpstreamError(std::string("malformed completion body: ") + e.what(), false);
  }
}

}  // namespace spandistill
