// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

struct BenchmarkItem {
  Question question;
  GoldAnswer gold;
};

struct Benchmark {
  std::map<TaskKind, std::vector<BenchmarkItem>> tasks;
  std::vector<std::string> warnings;  // e.g. item count != 50

  std::size_t item_count() const;
};

/// Parses one gold answer into the variant dictated by the task kind.
Result<GoldAnswer> parse_gold(TaskKind task, const std::string& text);

/// Loads `{dir}/{task_name}.json` for each in-scope task. Both accepted
/// layouts: {"question": "answer", ...} or [{"question":..., "answer":...}].
Result<Benchmark> load_benchmark(const std::filesystem::path& dir);

}  // namespace genomagent
