// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

/// Latin binomial -> common name mapping used for cross-species scoring.
/// Names absent from the vocabulary compare as plain lowercase strings.
class SpeciesVocabulary {
 public:
  static SpeciesVocabulary builtin();

  void add(const std::string& latin, const std::string& common);
  Result<void> load_file(const std::filesystem::path& file);  // merges

  /// Input is expected normalized (lowercase); unknown names map to themselves.
  std::string map_name(const std::string& normalized) const;

  /// Last known species name (Latin or common) appearing as a whole word
  /// inside the text; drives scoring of verbose answers.
  std::optional<std::string> last_name_in(const std::string& normalized) const;

  std::size_t size() const { return mapping_.size(); }

 private:
  std::map<std::string, std::string> mapping_;
};

/// Task-family scoring; always lands in [0, 1].
///   exact-text tasks: 1.0 iff the normalized strings match
///   disease association: recall of gold symbols among predicted symbols
///   species: vocabulary-mapped exact match
///   human alignment: 0 cross-chromosome, 0.5 same chromosome disjoint,
///     0.5 + 0.5*jaccard(pred, gold) on overlap (inclusive coordinates)
/// Fails with VariantMismatch when the gold variant contradicts the task.
Result<double> score_answer(TaskKind task, const Prediction& prediction,
                            const GoldAnswer& gold, const SpeciesVocabulary& vocabulary);

double interval_score(const GenomicInterval& predicted, const GenomicInterval& gold);

double recall_score(const std::vector<std::string>& predicted_symbols,
                    const std::set<std::string>& gold_symbols);

/// Arithmetic mean at full precision; display rounding happens at emission.
Result<double> macro_average(const std::vector<double>& per_task_means);

}  // namespace genomagent
