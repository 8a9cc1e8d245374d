// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "genomagent/llm/gateway.hpp"

namespace genomagent {

struct LiveLlmConfig {
  std::string base_url = "https://api.openai.com";
  std::string chat_path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_in_flight = 4;
  int requests_per_minute = 60;
  int max_retries = 3;
  int initial_backoff_ms = 500;
  int timeout_seconds = 60;
};

/// OpenAI-compatible chat-completions backend. Transient HTTP failures are
/// retried with exponential backoff; the API key is read from the
/// environment and never persisted.
std::shared_ptr<LlmBackend> make_live_llm(const LiveLlmConfig& config);

}  // namespace genomagent
