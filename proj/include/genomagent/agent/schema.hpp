// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace genomagent {

struct SchemaEntry {
  std::string path;
  std::string kind;     // "string", "number", "array[N] of ...", ...
  std::string example;  // scalar snippet, at most 64 chars
  std::optional<std::size_t> array_length;
};

/// Compact structural description of a large JSON document, depth-limited
/// and size-budgeted so it fits in one small extraction prompt.
struct SchemaSummary {
  std::vector<SchemaEntry> entries;
  bool truncated = false;

  std::string to_text() const;
  std::size_t serialized_size() const { return to_text().size(); }
};

inline constexpr int kSchemaMaxDepth = 5;
inline constexpr std::size_t kSchemaExampleLimit = 64;
inline constexpr const char* kSchemaTruncationMarker = "...";

/// Depth-first, key-sorted walk; arrays are represented by their first
/// element's shape plus the length. Output never exceeds `max_bytes`.
SchemaSummary summarize_schema(const nlohmann::json& document, std::size_t max_bytes);

}  // namespace genomagent
