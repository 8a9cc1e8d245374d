// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"
#include "genomagent/eval/errors.hpp"

namespace genomagent {

struct TaskResult {
  std::string question_id;
  TaskKind task = TaskKind::GeneAlias;
  double score = 0.0;
  std::int64_t cost_microusd = 0;
  ErrorClass error_class = ErrorClass::None;
  Outcome outcome = Outcome::Failed;
};

/// Aggregated run results. Costs are carried as integer micro-USD so the
/// total is exactly the sum of the per-item costs.
struct ScoreReport {
  std::string model_label;
  std::string backend_mode;
  std::string generated_at;  // empty under deterministic backends

  std::map<TaskKind, double> task_mean;
  std::map<TaskKind, std::int64_t> task_cost_microusd;
  std::map<TaskCategory, double> category_mean;
  std::map<TaskCategory, std::int64_t> category_cost_microusd;

  double macro_avg_tasks = 0.0;
  double macro_avg_categories = 0.0;
  std::int64_t total_cost_microusd = 0;

  std::vector<TaskResult> items;
};

/// Builds the aggregate view; EmptyInput when no items are present.
Result<ScoreReport> aggregate_report(std::vector<TaskResult> items, std::string model_label,
                                     std::string backend_mode, std::string generated_at = "");

std::string format_usd(std::int64_t microusd);        // "2.11"
std::string format_usd_precise(std::int64_t microusd);  // "2.110000"
std::string format_score(double score);               // "0.93"

/// Category-per-column table mirroring the benchmark's summary layout,
/// followed by the per-task breakdown.
std::string emit_table(const ScoreReport& report);

/// Full-precision CSV; parsing it back reproduces the report values.
std::string emit_csv(const ScoreReport& report);

nlohmann::json emit_json(const ScoreReport& report);

/// "label,avg_score,total_cost_usd" records, one per run.
std::string emit_scatter_csv(const std::vector<ScoreReport>& reports);

}  // namespace genomagent
