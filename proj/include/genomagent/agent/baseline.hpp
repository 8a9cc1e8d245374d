// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genomagent/core/engine.hpp"
#include "genomagent/core/result.hpp"
#include "genomagent/db/transport.hpp"
#include "genomagent/llm/gateway.hpp"

namespace genomagent {

/// The assembled single-agent prompt: instructions, API usage notes, worked
/// demonstrations (2 for the slim style, 4 for the full style) and the
/// question. Serialization is deterministic.
struct PromptAssembly {
  std::string task_instructions;
  std::string api_documentation;
  std::vector<std::string> examples;
  std::string question;

  std::string render() const;

  enum class Style { Full, Slim };

  /// Loads assets from `{dir}/instructions.txt`, `{dir}/apidocs.txt` and
  /// `{dir}/examples-{full,slim}.txt` (examples separated by "---" lines).
  static Result<PromptAssembly> load(const std::filesystem::path& dir, Style style,
                                     std::string question);
};

/// Returns the URL inside the last bracketed segment that parses as an
/// absolute http(s) URL; nothing when no segment qualifies. Pure.
std::optional<std::string> extract_api_call(std::string_view generated);

/// First `limit` bytes at a character boundary plus a truncation marker;
/// no limit returns the input unchanged.
std::string truncate_context(std::string_view api_result, std::optional<std::size_t> limit);

struct BaselineConfig {
  std::shared_ptr<LlmBackend> llm;
  std::shared_ptr<HttpTransport> http;
  std::filesystem::path prompt_dir;
  PromptAssembly::Style style = PromptAssembly::Style::Slim;
  int max_iterations = 10;
  std::optional<std::size_t> truncate_limit;  // none: append results whole
  int max_tokens = 1024;
};

/// Single-agent loop: generate until the call arrow stops generation,
/// execute the bracketed URL, append the result, and repeat until the
/// blank-line terminator (or the iteration cap) ends the episode.
class BaselineAgent : public QaEngine {
 public:
  explicit BaselineAgent(BaselineConfig config) : config_(std::move(config)) {}

  QaOutcome answer(const Question& question) override;

  static SourceId source_for_url(const std::string& url);

 private:
  BaselineConfig config_;
};

inline constexpr const char* kCallArrow = "\xE2\x86\x92";  // "→"
inline constexpr const char* kTerminator = "\n\n";

}  // namespace genomagent
