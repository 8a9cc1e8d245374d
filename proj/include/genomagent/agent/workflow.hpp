// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

enum class ResponseRoute { Json, Html };
enum class ConsensusPolicy { MajorityThenPriority, LlmSynthesis };

/// One upstream query of a workflow. `op` selects how the request is issued:
///   http_get               — GET `url` with {placeholders} bound from entities
///   eutils_search_summary  — esearch then esummary; params: db, term
///   eutils_summary         — esummary directly; params: db, id
///   blast_align            — submit + poll; params: sequence, program, database
///   ucsc_blat              — BLAT; params: sequence
/// `bind` optionally names a JSON path evaluated without any model call;
/// `value_map` rewrites extracted values (e.g. "protein-coding" -> "TRUE").
struct SourceSpec {
  SourceId source = SourceId::NCBI_EUTILS;
  std::string op = "http_get";
  std::string url;
  std::map<std::string, std::string> params;
  ResponseRoute route = ResponseRoute::Json;
  std::string target;
  std::string bind;
  std::map<std::string, std::string> value_map;

  /// Template identity for extraction-cache keys.
  std::string endpoint_key() const;
};

struct WorkflowConfig {
  TaskKind task = TaskKind::GeneAlias;
  std::vector<SourceSpec> sources;
  std::size_t json_size_threshold = 16 * 1024;
  ConsensusPolicy consensus = ConsensusPolicy::MajorityThenPriority;
};

Result<WorkflowConfig> load_workflow(const std::filesystem::path& file);

/// Loads `{dir}/{task_name}.json` for every task that has a file.
Result<std::map<TaskKind, WorkflowConfig>> load_workflows(const std::filesystem::path& dir);

/// Substitutes {name} placeholders; unbound placeholders are an error.
Result<std::string> bind_template(const std::string& tmpl, const EntityMap& entities);

/// All placeholder names appearing in the source's url/param templates.
std::vector<std::string> template_placeholders(const SourceSpec& spec);

}  // namespace genomagent
