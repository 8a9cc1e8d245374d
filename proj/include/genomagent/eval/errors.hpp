// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "genomagent/core/types.hpp"

namespace genomagent {

enum class ErrorClass { None, E1, E2, E3, Unclassified };

const char* error_class_name(ErrorClass error_class);

struct ErrorTaxonomyConfig {
  // Appended evidence beyond this budget marks context-loss territory.
  std::size_t context_budget_bytes = 100 * 1024;
};

/// The canonical strings a gold answer could surface as inside a response
/// body; drives the context-loss substring check.
std::vector<std::string> gold_search_strings(const GoldAnswer& gold);

/// Failure taxonomy over a transcript with score < 1:
///   E2 — the loop stopped without a usable call, or a generated program /
///        routing step was rejected
///   E1 — every call succeeded yet every parsed result set was empty
///   E3 — appended evidence blew the context budget while some response
///        body actually contained the gold answer
ErrorClass classify_error(const Transcript& transcript, double score, const GoldAnswer& gold,
                          const ErrorTaxonomyConfig& config = {});

}  // namespace genomagent
