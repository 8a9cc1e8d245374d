// SPDX-License-Identifier: Apache-2.0
#include "genomagent/eval/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "genomagent/core/text.hpp"

namespace genomagent {

using nlohmann::json;

SpeciesVocabulary SpeciesVocabulary::builtin() {
  SpeciesVocabulary vocabulary;
  vocabulary.add("homo sapiens", "human");
  vocabulary.add("mus musculus", "mouse");
  vocabulary.add("rattus norvegicus", "rat");
  vocabulary.add("danio rerio", "zebrafish");
  vocabulary.add("drosophila melanogaster", "fruit fly");
  vocabulary.add("caenorhabditis elegans", "worm");
  vocabulary.add("pan troglodytes", "chimpanzee");
  vocabulary.add("gallus gallus", "chicken");
  vocabulary.add("bos taurus", "cattle");
  vocabulary.add("sus scrofa", "pig");
  return vocabulary;
}

void SpeciesVocabulary::add(const std::string& latin, const std::string& common) {
  mapping_[to_lower_ascii(latin)] = common;
}

Result<void> SpeciesVocabulary::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::IoError, "cannot open vocabulary: " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "vocabulary must be a JSON object");
  }
  for (const auto& [latin, common] : doc.items()) {
    if (common.is_string()) add(latin, common.get<std::string>());
  }
  return {};
}

std::string SpeciesVocabulary::map_name(const std::string& normalized) const {
  auto it = mapping_.find(normalized);
  return it == mapping_.end() ? normalized : it->second;
}

namespace {

bool word_at(const std::string& text, std::size_t pos, std::size_t length) {
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  if (pos > 0 && is_word(text[pos - 1])) return false;
  std::size_t end = pos + length;
  if (end < text.size() && is_word(text[end])) return false;
  return true;
}

std::optional<std::size_t> last_word_occurrence(const std::string& text,
                                                const std::string& needle) {
  if (needle.empty()) return std::nullopt;
  std::size_t best = std::string::npos;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    if (word_at(text, pos, needle.size())) best = pos;
    ++pos;
  }
  if (best == std::string::npos) return std::nullopt;
  return best;
}

}  // namespace

std::optional<std::string> SpeciesVocabulary::last_name_in(const std::string& normalized) const {
  std::optional<std::string> found;
  std::size_t found_at = 0;
  auto consider = [&](const std::string& name) {
    if (auto pos = last_word_occurrence(normalized, name)) {
      if (!found || *pos >= found_at) {
        found = name;
        found_at = *pos;
      }
    }
  };
  for (const auto& [latin, common] : mapping_) {
    consider(latin);
    consider(common);
  }
  return found;
}

// ---------------------------------------------------------------------------

double interval_score(const GenomicInterval& predicted, const GenomicInterval& gold) {
  if (to_lower_ascii(predicted.chromosome) != to_lower_ascii(gold.chromosome)) {
    return 0.0;
  }
  std::uint64_t overlap_start = std::max(predicted.start, gold.start);
  std::uint64_t overlap_end = std::min(predicted.end, gold.end);
  if (overlap_start > overlap_end) {
    return 0.5;  // right chromosome, disjoint positions
  }
  // Inclusive coordinates: [708, 800] spans 93 base pairs.
  double overlap = static_cast<double>(overlap_end - overlap_start + 1);
  double union_length =
      static_cast<double>(std::max(predicted.end, gold.end) -
                          std::min(predicted.start, gold.start) + 1);
  return 0.5 + 0.5 * (overlap / union_length);
}

double recall_score(const std::vector<std::string>& predicted_symbols,
                    const std::set<std::string>& gold_symbols) {
  if (gold_symbols.empty()) return 0.0;
  std::set<std::string> predicted;
  for (const std::string& symbol : predicted_symbols) {
    predicted.insert(to_lower_ascii(trim(symbol)));
  }
  std::size_t matched = 0;
  for (const std::string& gold : gold_symbols) {
    if (predicted.contains(to_lower_ascii(trim(gold)))) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(gold_symbols.size());
}

namespace {

// Verbose answers carry the decision in the tail; the LAST task-shaped
// token of the normalized text is inspected when the exact comparison
// fails. Scanning the normalized form keeps scoring format-symmetric.
std::optional<std::string> last_chromosome_token(const std::string& normalized) {
  static const std::regex re(R"(chr(?:omosome)?\s*([0-9]{1,2}|[xym]|mt)\b)");
  std::optional<std::string> found;
  auto begin = std::sregex_iterator(normalized.begin(), normalized.end(), re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    found = normalize_answer((*it)[1].str(), TaskKind::GeneLocation);
  }
  return found;
}

std::optional<std::string> last_flag_token(const std::string& normalized) {
  static const std::regex re(R"(\b(true|false|yes|no|na)\b)");
  std::optional<std::string> found;
  auto begin = std::sregex_iterator(normalized.begin(), normalized.end(), re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    found = (*it)[1].str();
  }
  return found;
}

}  // namespace

Result<double> score_answer(TaskKind task, const Prediction& prediction,
                            const GoldAnswer& gold, const SpeciesVocabulary& vocabulary) {
  if (gold_variant_of(gold) != gold_variant_for(task)) {
    return make_error(Errc::VariantMismatch,
                      std::string("gold variant inconsistent with task ") + task_name(task));
  }

  std::string normalized = normalize_answer(prediction.raw, task);

  switch (gold_variant_for(task)) {
    case GoldVariant::ExactText: {
      const auto& expected = std::get<GoldAnswer::ExactText>(gold.value);
      std::string gold_normalized = normalize_answer(expected.text, task);
      if (normalized == gold_normalized) return 1.0;
      if (task == TaskKind::GeneLocation || task == TaskKind::SnpLocation) {
        auto token = last_chromosome_token(normalized);
        return token && *token == gold_normalized ? 1.0 : 0.0;
      }
      if (task == TaskKind::ProteinCodingGenes) {
        auto token = last_flag_token(normalized);
        return token && *token == gold_normalized ? 1.0 : 0.0;
      }
      return 0.0;
    }
    case GoldVariant::GeneSet: {
      const auto& expected = std::get<GoldAnswer::GeneSet>(gold.value);
      return recall_score(split_symbols(normalized), expected.symbols);
    }
    case GoldVariant::Species: {
      const auto& expected = std::get<GoldAnswer::Species>(gold.value);
      std::string gold_common = vocabulary.map_name(normalize_answer(expected.name, task));
      if (vocabulary.map_name(normalized) == gold_common) return 1.0;
      if (auto found = vocabulary.last_name_in(normalized)) {
        return vocabulary.map_name(*found) == gold_common ? 1.0 : 0.0;
      }
      return 0.0;
    }
    case GoldVariant::Interval: {
      const auto& expected = std::get<GoldAnswer::Interval>(gold.value);
      auto predicted = parse_interval(normalized);
      if (!predicted.ok()) return 0.0;
      return interval_score(predicted.value(), expected.interval);
    }
  }
  return make_error(Errc::VariantMismatch, "unhandled gold variant");
}

Result<double> macro_average(const std::vector<double>& per_task_means) {
  if (per_task_means.empty()) {
    return make_error(Errc::EmptyInput, "macro average over no tasks");
  }
  double sum = 0.0;
  for (double value : per_task_means) sum += value;
  return sum / static_cast<double>(per_task_means.size());
}

}  // namespace genomagent
