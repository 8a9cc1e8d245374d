// SPDX-License-Identifier: Apache-2.0
#include "genomagent/llm/live.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace genomagent {

using nlohmann::json;

namespace {

class LiveLlm : public LlmBackend {
 public:
  explicit LiveLlm(LiveLlmConfig config) : config_(std::move(config)) {}

  Result<CompletionResult> complete(const CompletionRequest& request) override {
    if (auto check = validate_request(request); !check.ok()) return check.error();

    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      return make_error(Errc::BackendUnavailable,
                        "missing API key in $" + config_.api_key_env);
    }

    json payload = {
        {"model", config_.model},
        {"messages", json::array()},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
    if (!request.system_prompt.empty()) {
      payload["messages"].push_back({{"role", "system"}, {"content", request.system_prompt}});
    }
    payload["messages"].push_back({{"role", "user"}, {"content", request.user_prompt}});
    if (!request.stop_sequences.empty()) payload["stop"] = request.stop_sequences;

    InFlightGuard guard(*this);
    throttle();

    std::string error_detail;
    int backoff_ms = config_.initial_backoff_ms;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
      }
      httplib::Client client(config_.base_url);
      client.set_connection_timeout(config_.timeout_seconds, 0);
      client.set_read_timeout(config_.timeout_seconds, 0);
      client.set_bearer_token_auth(key);

      auto res = client.Post(config_.chat_path, payload.dump(), "application/json");
      if (!res) {
        error_detail = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        error_detail = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        return make_error(Errc::BackendUnavailable,
                          "HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      return parse_response(res->body, request);
    }
    return make_error(Errc::BackendUnavailable, "exhausted retries: " + error_detail);
  }

  std::string name() const override { return "live"; }

 private:
  struct InFlightGuard {
    explicit InFlightGuard(LiveLlm& llm) : llm_(llm) {
      std::unique_lock<std::mutex> lock(llm_.mutex_);
      llm_.slot_free_.wait(lock, [&] { return llm_.in_flight_ < llm_.config_.max_in_flight; });
      ++llm_.in_flight_;
    }
    ~InFlightGuard() {
      {
        std::lock_guard<std::mutex> lock(llm_.mutex_);
        --llm_.in_flight_;
      }
      llm_.slot_free_.notify_one();
    }
    LiveLlm& llm_;
  };

  void throttle() {
    using clock = std::chrono::steady_clock;
    std::unique_lock<std::mutex> lock(mutex_);
    auto now = clock::now();
    auto window = std::chrono::minutes(1);
    while (!recent_.empty() && now - recent_.front() > window) recent_.pop_front();
    if (static_cast<int>(recent_.size()) >= config_.requests_per_minute) {
      auto wake = recent_.front() + window;
      lock.unlock();
      std::this_thread::sleep_until(wake);
      lock.lock();
      now = clock::now();
      while (!recent_.empty() && now - recent_.front() > window) recent_.pop_front();
    }
    recent_.push_back(now);
  }

  Result<CompletionResult> parse_response(const std::string& body,
                                          const CompletionRequest& request) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
      return make_error(Errc::MalformedResponse, "unexpected completion payload");
    }
    const auto& choice = doc["choices"][0];
    std::string text = choice.value("/message/content"_json_pointer, std::string());
    std::string finish = choice.value("finish_reason", "stop");

    // The server already honored the stop list; re-apply locally so the
    // finish reason records which sequence fired.
    CompletionResult result = apply_stop_sequences(std::move(text), request.stop_sequences);
    if (result.finish != FinishReason::StopSequence) {
      if (finish == "length") {
        result.finish = FinishReason::Length;
      } else if (finish == "stop" && !request.stop_sequences.empty()) {
        // Server-side stop with the matched sequence stripped; attribute it
        // to the first configured sequence when unambiguous.
        if (request.stop_sequences.size() == 1) {
          result.finish = FinishReason::StopSequence;
          result.matched_stop = request.stop_sequences[0];
        }
      }
    }
    result.usage.prompt_tokens = doc.value("/usage/prompt_tokens"_json_pointer, 0ULL);
    result.usage.completion_tokens = doc.value("/usage/completion_tokens"_json_pointer, 0ULL);
    return result;
  }

  LiveLlmConfig config_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

}  // namespace

std::shared_ptr<LlmBackend> make_live_llm(const LiveLlmConfig& config) {
  return std::make_shared<LiveLlm>(config);
}

}  // namespace genomagent
