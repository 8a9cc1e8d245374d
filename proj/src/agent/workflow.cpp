// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/workflow.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace genomagent {

using nlohmann::json;

std::string SourceSpec::endpoint_key() const {
  if (op == "http_get") return op + ":" + url;
  std::string key = op;
  for (const auto& [name, value] : params) {
    key += ":" + name + "=" + value;
  }
  return key;
}

Result<std::string> bind_template(const std::string& tmpl, const EntityMap& entities) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      auto close = tmpl.find('}', pos);
      if (close == std::string::npos) {
        return make_error(Errc::InvalidArgument, "unterminated placeholder in: " + tmpl);
      }
      std::string name = tmpl.substr(pos + 1, close - pos - 1);
      auto it = entities.find(name);
      if (it == entities.end()) {
        return make_error(Errc::InvalidArgument, "placeholder {" + name + "} is not bindable");
      }
      out += it->second;
      pos = close + 1;
    } else {
      out.push_back(tmpl[pos]);
      ++pos;
    }
  }
  return out;
}

std::vector<std::string> template_placeholders(const SourceSpec& spec) {
  std::vector<std::string> names;
  auto scan = [&](const std::string& tmpl) {
    std::size_t pos = 0;
    while ((pos = tmpl.find('{', pos)) != std::string::npos) {
      auto close = tmpl.find('}', pos);
      if (close == std::string::npos) break;
      names.push_back(tmpl.substr(pos + 1, close - pos - 1));
      pos = close + 1;
    }
  };
  scan(spec.url);
  for (const auto& [_, value] : spec.params) scan(value);
  return names;
}

namespace {

Result<SourceSpec> parse_source(const json& doc) {
  SourceSpec spec;
  auto source = source_from_name(doc.value("source", ""));
  if (!source) {
    return make_error(Errc::InvalidArgument, "unknown source: " + doc.value("source", ""));
  }
  spec.source = *source;
  spec.op = doc.value("op", "http_get");
  spec.url = doc.value("url", "");
  spec.target = doc.value("target", "");
  spec.bind = doc.value("bind", "");

  std::string route = doc.value("route", "json");
  if (route == "json") {
    spec.route = ResponseRoute::Json;
  } else if (route == "html") {
    spec.route = ResponseRoute::Html;
  } else {
    return make_error(Errc::InvalidArgument, "unknown route: " + route);
  }

  if (doc.contains("params") && doc["params"].is_object()) {
    for (const auto& [key, value] : doc["params"].items()) {
      if (!value.is_string()) {
        return make_error(Errc::InvalidArgument, "param " + key + " must be a string");
      }
      spec.params[key] = value.get<std::string>();
    }
  }
  if (doc.contains("value_map") && doc["value_map"].is_object()) {
    for (const auto& [key, value] : doc["value_map"].items()) {
      spec.value_map[key] = value.get<std::string>();
    }
  }
  return spec;
}

}  // namespace

Result<WorkflowConfig> load_workflow(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::IoError, "cannot open workflow: " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "workflow is not a JSON object: " + file.string());
  }

  WorkflowConfig config;
  auto task = task_from_name(doc.value("task", ""));
  if (!task) {
    return make_error(Errc::InvalidArgument,
                      "unknown task in workflow: " + doc.value("task", ""));
  }
  config.task = *task;
  config.json_size_threshold = doc.value("json_size_threshold", 16 * 1024);

  std::string consensus = doc.value("consensus", "majority_then_priority");
  if (consensus == "majority_then_priority") {
    config.consensus = ConsensusPolicy::MajorityThenPriority;
  } else if (consensus == "llm_synthesis") {
    config.consensus = ConsensusPolicy::LlmSynthesis;
  } else {
    return make_error(Errc::InvalidArgument, "unknown consensus policy: " + consensus);
  }

  if (!doc.contains("sources") || !doc["sources"].is_array() || doc["sources"].empty()) {
    return make_error(Errc::InvalidArgument,
                      "workflow must list at least one source: " + file.string());
  }
  for (const auto& item : doc["sources"]) {
    auto spec = parse_source(item);
    if (!spec.ok()) return spec.error();
    config.sources.push_back(std::move(spec.value()));
  }
  return config;
}

Result<std::map<TaskKind, WorkflowConfig>> load_workflows(const std::filesystem::path& dir) {
  std::map<TaskKind, WorkflowConfig> out;
  if (!std::filesystem::is_directory(dir)) {
    return make_error(Errc::IoError, "workflow directory missing: " + dir.string());
  }
  for (TaskKind task : kAllTasks) {
    auto file = dir / (std::string(task_name(task)) + ".json");
    if (!std::filesystem::exists(file)) continue;
    auto config = load_workflow(file);
    if (!config.ok()) return config.error();
    out.emplace(task, std::move(config.value()));
  }
  if (out.empty()) {
    return make_error(Errc::IoError, "no workflow files under " + dir.string());
  }
  return out;
}

}  // namespace genomagent
