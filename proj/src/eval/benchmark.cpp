// SPDX-License-Identifier: Apache-2.0
#include "genomagent/eval/benchmark.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "genomagent/core/text.hpp"

namespace genomagent {

using nlohmann::json;

std::size_t Benchmark::item_count() const {
  std::size_t n = 0;
  for (const auto& [task, items] : tasks) n += items.size();
  return n;
}

Result<GoldAnswer> parse_gold(TaskKind task, const std::string& text) {
  GoldAnswer gold;
  switch (gold_variant_for(task)) {
    case GoldVariant::ExactText:
      gold.value = GoldAnswer::ExactText{text};
      return gold;
    case GoldVariant::Species:
      gold.value = GoldAnswer::Species{text};
      return gold;
    case GoldVariant::GeneSet: {
      GoldAnswer::GeneSet set;
      for (const std::string& symbol : split_symbols(text)) set.symbols.insert(symbol);
      if (set.symbols.empty()) {
        return make_error(Errc::GoldParseFailure, "gene set gold is empty: " + text);
      }
      gold.value = std::move(set);
      return gold;
    }
    case GoldVariant::Interval: {
      auto interval = parse_interval(text);
      if (!interval.ok()) {
        return make_error(Errc::GoldParseFailure,
                          "gold is not a valid interval: " + text + " (" +
                              interval.error().message + ")");
      }
      gold.value = GoldAnswer::Interval{interval.value()};
      return gold;
    }
  }
  return make_error(Errc::GoldParseFailure, "unhandled gold variant");
}

namespace {

std::string gold_text_of(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ", ";
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    return joined;
  }
  return value.dump();
}

Result<std::vector<BenchmarkItem>> load_task_file(TaskKind task,
                                                  const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::MissingTaskFile, "cannot open " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::GoldParseFailure, file.string() + " is not valid JSON");
  }

  std::vector<std::pair<std::string, json>> pairs;
  if (doc.is_object()) {
    for (const auto& [question, answer] : doc.items()) pairs.emplace_back(question, answer);
  } else if (doc.is_array()) {
    for (const auto& item : doc) {
      if (!item.is_object() || !item.contains("question") || !item.contains("answer")) {
        return make_error(Errc::GoldParseFailure,
                          file.string() + ": array items need question and answer fields");
      }
      pairs.emplace_back(item["question"].get<std::string>(), item["answer"]);
    }
  } else {
    return make_error(Errc::GoldParseFailure, file.string() + " must be an object or array");
  }

  std::vector<BenchmarkItem> items;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [question_text, answer] = pairs[i];
    if (trim(question_text).empty()) {
      return make_error(Errc::GoldParseFailure,
                        file.string() + " item " + std::to_string(i) + ": empty question");
    }
    auto gold = parse_gold(task, gold_text_of(answer));
    if (!gold.ok()) {
      return make_error(Errc::GoldParseFailure, file.string() + " item " + std::to_string(i) +
                                                    ": " + gold.error().message);
    }
    BenchmarkItem item;
    item.question.id = std::string(task_name(task)) + "-" + std::to_string(i);
    item.question.task = task;
    item.question.text = question_text;
    item.gold = std::move(gold.value());
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

Result<Benchmark> load_benchmark(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    return make_error(Errc::MissingTaskFile, "benchmark directory missing: " + dir.string());
  }

  Benchmark benchmark;
  for (TaskKind task : kAllTasks) {
    auto file = dir / (std::string(task_name(task)) + ".json");
    if (!std::filesystem::exists(file)) continue;
    auto items = load_task_file(task, file);
    if (!items.ok()) return items.error();
    if (items.value().empty()) {
      return make_error(Errc::GoldParseFailure, file.string() + " holds no items");
    }
    if (items.value().size() != 50) {
      benchmark.warnings.push_back(std::string(task_name(task)) + ": expected 50 items, found " +
                                   std::to_string(items.value().size()));
    }
    benchmark.tasks.emplace(task, std::move(items.value()));
  }

  if (benchmark.tasks.empty()) {
    return make_error(Errc::MissingTaskFile, "no task files under " + dir.string());
  }
  return benchmark;
}

}  // namespace genomagent
