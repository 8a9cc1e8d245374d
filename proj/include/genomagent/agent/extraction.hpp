// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

inline constexpr std::size_t kMaxProgramInstructions = 32;
inline constexpr std::size_t kMaxRegexPatternLength = 256;
// Inputs are truncated before regex evaluation to bound execution time.
inline constexpr std::size_t kMaxRegexInputLength = 64 * 1024;

/// One step of a declarative extraction program. The closed instruction set
/// keeps generated extractors interpretable: no generated code ever runs.
struct Instruction {
  enum class Op { SelectCss, SelectPath, Nth, Text, Attr, RegexCapture, First };

  Op op;
  std::string arg;  // selector / path / attribute name / regex pattern
  int number = 0;   // Nth index or regex capture group

  bool operator==(const Instruction&) const = default;
};

struct ExtractionProgram {
  std::vector<Instruction> instructions;
  std::string target_description;

  std::string to_text() const;
  bool operator==(const ExtractionProgram& other) const {
    return instructions == other.instructions;
  }
};

/// Parses program text such as `SelectCss("td.chr"), First, Text`.
/// Instructions may be separated by commas, semicolons or newlines; a
/// surrounding markdown code fence is tolerated.
Result<ExtractionProgram> parse_program(std::string_view text);

Result<void> validate_program(const ExtractionProgram& program);

/// Pure interpretation over a response body: no I/O, no mutation outside
/// the returned strings. Empty extraction is ExtractionFailed.
Result<std::vector<std::string>> execute_program(const ExtractionProgram& program,
                                                 const std::string& body, ContentKind kind);

/// Stable hash of the document's structural skeleton (HTML tag/class paths
/// or JSON key paths); text content never contributes, so pages with the
/// same shape share one fingerprint.
std::string structure_fingerprint(const std::string& body, ContentKind kind);

// ---------------------------------------------------------------------------

/// Shared cache of working extractors, keyed by source + endpoint template +
/// structure fingerprint. Lookups never mutate stored programs.
class ExtractionCache {
 public:
  static std::string make_key(SourceId source, const std::string& endpoint,
                              const std::string& fingerprint);

  std::optional<ExtractionProgram> lookup(const std::string& key);
  void store(const std::string& key, ExtractionProgram program);

  std::uint64_t hit_count(const std::string& key) const;
  std::size_t size() const;

  Result<void> load_file(const std::filesystem::path& file);
  Result<void> save_file(const std::filesystem::path& file) const;

 private:
  struct Slot {
    ExtractionProgram program;
    std::uint64_t hits = 0;
  };
  std::map<std::string, Slot> slots_;
  mutable std::mutex mutex_;
};

}  // namespace genomagent
