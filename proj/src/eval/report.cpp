// SPDX-License-Identifier: Apache-2.0
#include "genomagent/eval/report.hpp"

#include <cstdio>

#include "genomagent/eval/scoring.hpp"

namespace genomagent {

using nlohmann::json;

Result<ScoreReport> aggregate_report(std::vector<TaskResult> items, std::string model_label,
                                     std::string backend_mode, std::string generated_at) {
  ScoreReport report;
  report.model_label = std::move(model_label);
  report.backend_mode = std::move(backend_mode);
  report.generated_at = std::move(generated_at);
  report.items = std::move(items);

  std::map<TaskKind, std::pair<double, std::size_t>> sums;
  for (const TaskResult& item : report.items) {
    auto& [sum, count] = sums[item.task];
    sum += item.score;
    count += 1;
    report.task_cost_microusd[item.task] += item.cost_microusd;
    report.total_cost_microusd += item.cost_microusd;
  }

  std::vector<double> task_means;
  for (const auto& [task, sum_count] : sums) {
    double mean = sum_count.first / static_cast<double>(sum_count.second);
    report.task_mean[task] = mean;
    task_means.push_back(mean);
  }

  auto macro_tasks = macro_average(task_means);
  if (!macro_tasks.ok()) return macro_tasks.error();
  report.macro_avg_tasks = macro_tasks.value();

  std::map<TaskCategory, std::pair<double, std::size_t>> category_sums;
  for (const auto& [task, mean] : report.task_mean) {
    auto& [sum, count] = category_sums[category(task)];
    sum += mean;
    count += 1;
  }
  for (const auto& [task, cost] : report.task_cost_microusd) {
    report.category_cost_microusd[category(task)] += cost;
  }

  std::vector<double> category_means;
  for (const auto& [cat, sum_count] : category_sums) {
    double mean = sum_count.first / static_cast<double>(sum_count.second);
    report.category_mean[cat] = mean;
    category_means.push_back(mean);
  }
  auto macro_categories = macro_average(category_means);
  if (!macro_categories.ok()) return macro_categories.error();
  report.macro_avg_categories = macro_categories.value();
  return report;
}

std::string format_usd(std::int64_t microusd) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", static_cast<double>(microusd) / 1e6);
  return buffer;
}

std::string format_usd_precise(std::int64_t microusd) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", static_cast<double>(microusd) / 1e6);
  return buffer;
}

std::string format_score(double score) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", score);
  return buffer;
}

namespace {

std::string format_score_full(double score) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", score);
  return buffer;
}

std::string pad(std::string s, std::size_t width) {
  while (s.size() < width) s.push_back(' ');
  return s;
}

}  // namespace

std::string emit_table(const ScoreReport& report) {
  std::string out;
  out += pad("Model", 24);
  for (TaskCategory cat : kAllCategories) {
    out += pad(category_name(cat), 20);
  }
  out += "Overall\n";
  out += pad("", 24);
  for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
    out += pad("Score", 8) + pad("Cost($)", 12);
  }
  out += pad("Avg", 8) + "Total($)\n";

  out += pad(report.model_label, 24);
  for (TaskCategory cat : kAllCategories) {
    auto mean = report.category_mean.find(cat);
    auto cost = report.category_cost_microusd.find(cat);
    out += pad(mean == report.category_mean.end() ? "-" : format_score(mean->second), 8);
    out += pad(cost == report.category_cost_microusd.end() ? "-" : format_usd(cost->second), 12);
  }
  out += pad(format_score(report.macro_avg_categories), 8);
  out += format_usd(report.total_cost_microusd);
  out += "\n\n";

  out += pad("Task", 24) + pad("Score", 8) + pad("Cost($)", 12) + "Items\n";
  for (const auto& [task, mean] : report.task_mean) {
    std::size_t items = 0;
    for (const TaskResult& item : report.items) {
      if (item.task == task) ++items;
    }
    out += pad(task_name(task), 24);
    out += pad(format_score(mean), 8);
    out += pad(format_usd(report.task_cost_microusd.at(task)), 12);
    out += std::to_string(items) + "\n";
  }
  out += "\n";
  out += "macro average over tasks: " + format_score(report.macro_avg_tasks) + "\n";
  out += "macro average over categories: " + format_score(report.macro_avg_categories) + "\n";
  out += "total cost ($): " + format_usd(report.total_cost_microusd) + "\n";
  return out;
}

std::string emit_csv(const ScoreReport& report) {
  std::string out = "kind,name,score,cost_usd\n";
  for (const auto& [task, mean] : report.task_mean) {
    out += "task," + std::string(task_name(task)) + "," + format_score_full(mean) + "," +
           format_usd_precise(report.task_cost_microusd.at(task)) + "\n";
  }
  for (const auto& [cat, mean] : report.category_mean) {
    out += "category," + std::string(category_name(cat)) + "," + format_score_full(mean) + "," +
           format_usd_precise(report.category_cost_microusd.at(cat)) + "\n";
  }
  out += "overall,macro_avg_tasks," + format_score_full(report.macro_avg_tasks) + ",\n";
  out += "overall,macro_avg_categories," + format_score_full(report.macro_avg_categories) + ",\n";
  out += "overall,total_cost,," + format_usd_precise(report.total_cost_microusd) + "\n";
  return out;
}

json emit_json(const ScoreReport& report) {
  json tasks = json::object();
  for (const auto& [task, mean] : report.task_mean) {
    tasks[task_name(task)] = {
        {"mean_score", mean},
        {"cost_usd", static_cast<double>(report.task_cost_microusd.at(task)) / 1e6},
    };
  }
  json categories = json::object();
  for (const auto& [cat, mean] : report.category_mean) {
    categories[category_name(cat)] = {
        {"mean_score", mean},
        {"cost_usd", static_cast<double>(report.category_cost_microusd.at(cat)) / 1e6},
    };
  }
  json items = json::array();
  for (const TaskResult& item : report.items) {
    items.push_back({
        {"question_id", item.question_id},
        {"task", task_name(item.task)},
        {"score", item.score},
        {"cost_usd", static_cast<double>(item.cost_microusd) / 1e6},
        {"error_class", error_class_name(item.error_class)},
        {"outcome", item.outcome == Outcome::Answered ? "Answered" : "Failed"},
    });
  }
  json doc = {
      {"model_label", report.model_label},
      {"backend_mode", report.backend_mode},
      {"tasks", tasks},
      {"categories", categories},
      {"macro_avg_tasks", report.macro_avg_tasks},
      {"macro_avg_categories", report.macro_avg_categories},
      {"total_cost_usd", static_cast<double>(report.total_cost_microusd) / 1e6},
      {"items", items},
  };
  if (!report.generated_at.empty()) doc["generated_at"] = report.generated_at;
  return doc;
}

std::string emit_scatter_csv(const std::vector<ScoreReport>& reports) {
  std::string out = "label,avg_score,total_cost_usd\n";
  for (const ScoreReport& report : reports) {
    out += report.model_label + "," + format_score_full(report.macro_avg_categories) + "," +
           format_usd_precise(report.total_cost_microusd) + "\n";
  }
  return out;
}

}  // namespace genomagent
