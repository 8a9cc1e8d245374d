// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "genomagent/core/engine.hpp"
#include "genomagent/eval/benchmark.hpp"
#include "genomagent/eval/errors.hpp"
#include "genomagent/eval/report.hpp"
#include "genomagent/eval/scoring.hpp"

namespace genomagent {

struct RunnerOptions {
  std::string model_label = "unknown";
  std::string backend_mode = "mock";
  std::string generated_at;  // left empty for deterministic output
  int parallelism = 1;
  SpeciesVocabulary vocabulary = SpeciesVocabulary::builtin();
  ErrorTaxonomyConfig taxonomy;
};

/// Runs every benchmark item through the engine, scoring and classifying
/// each. An engine failure scores 0 and never aborts the run.
Result<ScoreReport> run_benchmark(const Benchmark& benchmark, QaEngine& engine,
                                  const Pricing& pricing, const RunnerOptions& options);

}  // namespace genomagent
