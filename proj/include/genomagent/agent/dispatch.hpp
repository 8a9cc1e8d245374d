// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <vector>

#include "genomagent/agent/workflow.hpp"
#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

using SourceRunner =
    std::function<Result<ApiResponse>(const SourceSpec&, const EntityMap&)>;

struct DispatchOptions {
  int parallelism = 4;
  std::chrono::milliseconds per_source_timeout{30000};
};

struct SourceOutcome {
  std::size_t source_index = 0;
  SourceId source = SourceId::NCBI_EUTILS;
  Result<ApiResponse> response;
};

/// Queries every source concurrently under a parallelism bound. One source's
/// failure never disturbs the others; a source that exceeds its timeout is
/// reported as Errc::Timeout. Result order matches config.sources order.
/// Fails fast with InvalidArgument when a template placeholder cannot be
/// bound from the entities.
Result<std::vector<SourceOutcome>> dispatch(const WorkflowConfig& config,
                                            const EntityMap& entities,
                                            const SourceRunner& runner,
                                            const DispatchOptions& options);

bool all_sources_failed(const std::vector<SourceOutcome>& outcomes);

}  // namespace genomagent
