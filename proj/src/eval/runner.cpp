// SPDX-License-Identifier: Apache-2.0
#include "genomagent/eval/runner.hpp"

#include <atomic>
#include <thread>

#include "genomagent/llm/gateway.hpp"

namespace genomagent {

Result<ScoreReport> run_benchmark(const Benchmark& benchmark, QaEngine& engine,
                                  const Pricing& pricing, const RunnerOptions& options) {
  struct Job {
    const BenchmarkItem* item;
  };
  std::vector<Job> jobs;
  for (const auto& [task, items] : benchmark.tasks) {
    for (const BenchmarkItem& item : items) jobs.push_back({&item});
  }
  if (jobs.empty()) {
    return make_error(Errc::EmptyInput, "benchmark holds no items");
  }

  std::vector<TaskResult> results(jobs.size());

  auto evaluate = [&](std::size_t index) {
    const BenchmarkItem& item = *jobs[index].item;
    QaOutcome outcome = engine.answer(item.question);

    TaskResult result;
    result.question_id = item.question.id;
    result.task = item.question.task;
    result.outcome = outcome.transcript.outcome;
    result.cost_microusd = cost_microusd(outcome.transcript.total_usage, pricing);

    if (outcome.transcript.outcome == Outcome::Answered) {
      auto score =
          score_answer(item.question.task, outcome.prediction, item.gold, options.vocabulary);
      result.score = score.ok() ? score.value() : 0.0;
    } else {
      result.score = 0.0;
    }
    result.error_class = result.score >= 1.0
                             ? ErrorClass::None
                             : classify_error(outcome.transcript, result.score, item.gold,
                                              options.taxonomy);
    results[index] = std::move(result);
  };

  if (options.parallelism <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    int worker_count = std::min<int>(options.parallelism, static_cast<int>(jobs.size()));
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        while (true) {
          std::size_t index = next.fetch_add(1);
          if (index >= jobs.size()) break;
          evaluate(index);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  return aggregate_report(std::move(results), options.model_label, options.backend_mode,
                          options.generated_at);
}

}  // namespace genomagent
