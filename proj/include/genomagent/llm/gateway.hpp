// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

struct CompletionRequest {
  std::string system_prompt;
  std::string user_prompt;
  std::vector<std::string> stop_sequences;
  int max_tokens = 1024;
  double temperature = 0.0;
};

enum class FinishReason { Stop, StopSequence, Length };

const char* finish_reason_name(FinishReason reason);
std::optional<FinishReason> finish_reason_from_name(const std::string& name);

struct CompletionResult {
  std::string text;
  FinishReason finish = FinishReason::Stop;
  std::string matched_stop;  // set when finish == StopSequence
  TokenUsage usage;
};

Result<void> validate_request(const CompletionRequest& request);

/// Truncates `text` at the earliest stop sequence occurrence, if any.
CompletionResult apply_stop_sequences(std::string text,
                                      const std::vector<std::string>& stops);

/// USD cost of a usage at the given rates, rounded half-even to 6 decimals.
double cost_usd(const TokenUsage& usage, const Pricing& pricing);

/// Same cost in integer micro-USD; summing these accumulates without drift.
std::int64_t cost_microusd(const TokenUsage& usage, const Pricing& pricing);

Result<Pricing> load_pricing(const std::filesystem::path& file);

// ---------------------------------------------------------------------------

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual Result<CompletionResult> complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic scripted backend.

struct MockEntry {
  std::optional<std::size_t> index;      // match by zero-based call index
  std::optional<std::string> substring;  // match by prompt containment
  std::string response;
};

struct MockScript {
  std::vector<MockEntry> entries;

  static Result<MockScript> from_json_file(const std::filesystem::path& file);
};

/// Scripted backend. On each call, entries are scanned top-down: an entry
/// matches by call index, by prompt substring, or — when it carries no
/// matcher — as the next unconsumed entry in order. Matcher-based entries
/// are reusable; plain entries are consumed once. Token usage follows the
/// estimation rule ceil(chars / 4) over prompts and returned text.
class MockLlm : public LlmBackend {
 public:
  explicit MockLlm(MockScript script) : script_(std::move(script)) {}

  Result<CompletionResult> complete(const CompletionRequest& request) override;
  std::string name() const override { return "mock"; }

  std::size_t calls_made() const;

 private:
  MockScript script_;
  std::vector<bool> consumed_ = std::vector<bool>(script_.entries.size(), false);
  std::size_t calls_ = 0;
  mutable std::mutex mutex_;
};

/// Wrapper that counts completions passing through; used by tests and the
/// pipeline-frugality checks.
class CountingLlm : public LlmBackend {
 public:
  explicit CountingLlm(std::shared_ptr<LlmBackend> inner) : inner_(std::move(inner)) {}

  Result<CompletionResult> complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_->name(); }

  std::size_t calls() const;

 private:
  std::shared_ptr<LlmBackend> inner_;
  std::size_t calls_ = 0;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Record/replay backend. One pretty-printed JSON file per request digest.

class CassetteLlm : public LlmBackend {
 public:
  /// Replay-only: serves recorded completions, CassetteMiss otherwise.
  explicit CassetteLlm(std::filesystem::path dir);

  /// Recording: forwards to `inner` and persists each result before return.
  CassetteLlm(std::filesystem::path dir, std::shared_ptr<LlmBackend> inner);

  Result<CompletionResult> complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_ ? "record" : "replay"; }

  static std::string request_digest(const CompletionRequest& request);

 private:
  std::filesystem::path dir_;
  std::shared_ptr<LlmBackend> inner_;
  std::mutex write_mutex_;
};

}  // namespace genomagent
