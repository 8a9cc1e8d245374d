// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/schema.hpp"

namespace genomagent {

using nlohmann::json;

namespace {

std::string scalar_kind(const json& value) {
  if (value.is_string()) return "string";
  if (value.is_boolean()) return "boolean";
  if (value.is_null()) return "null";
  if (value.is_number()) return "number";
  if (value.is_object()) return "object";
  return "array";
}

std::string example_snippet(const json& value) {
  std::string s = value.is_string() ? value.get<std::string>() : value.dump();
  if (s.size() > kSchemaExampleLimit) {
    s.resize(kSchemaExampleLimit - 1);
    s += "\xE2\x80\xA6";
  }
  return s;
}

void walk(const json& value, const std::string& path, int depth, SchemaSummary* out) {
  if (value.is_object()) {
    if (depth >= kSchemaMaxDepth) {
      out->entries.push_back({path, "object", kSchemaTruncationMarker, std::nullopt});
      out->truncated = true;
      return;
    }
    // nlohmann objects iterate in key order, giving the sorted walk for free.
    for (const auto& [key, child] : value.items()) {
      std::string child_path = path.empty() ? key : path + "." + key;
      if (child.is_object() || child.is_array()) {
        walk(child, child_path, depth + 1, out);
      } else {
        out->entries.push_back({child_path, scalar_kind(child), example_snippet(child), std::nullopt});
      }
    }
    return;
  }
  if (value.is_array()) {
    if (value.empty()) {
      out->entries.push_back({path, "array[0]", "", 0});
      return;
    }
    const json& first = value[0];
    std::string kind = "array[" + std::to_string(value.size()) + "] of " + scalar_kind(first);
    if (first.is_object() || first.is_array()) {
      out->entries.push_back({path, kind, "", value.size()});
      if (depth >= kSchemaMaxDepth) {
        out->entries.push_back({path + "[0]", scalar_kind(first), kSchemaTruncationMarker, std::nullopt});
        out->truncated = true;
      } else {
        walk(first, path + "[0]", depth + 1, out);
      }
    } else {
      out->entries.push_back({path, kind, example_snippet(first), value.size()});
    }
    return;
  }
  out->entries.push_back({path, scalar_kind(value), example_snippet(value), std::nullopt});
}

}  // namespace

std::string SchemaSummary::to_text() const {
  std::string out;
  for (const SchemaEntry& entry : entries) {
    out += entry.path.empty() ? "$" : entry.path;
    out += ": ";
    out += entry.kind;
    if (!entry.example.empty()) {
      out += " = ";
      out += entry.example;
    }
    out.push_back('\n');
  }
  if (truncated) {
    out += kSchemaTruncationMarker;
    out.push_back('\n');
  }
  return out;
}

SchemaSummary summarize_schema(const json& document, std::size_t max_bytes) {
  SchemaSummary summary;
  walk(document, "", 0, &summary);

  while (!summary.entries.empty() && summary.serialized_size() > max_bytes) {
    summary.entries.pop_back();
    summary.truncated = true;
  }
  return summary;
}

}  // namespace genomagent
