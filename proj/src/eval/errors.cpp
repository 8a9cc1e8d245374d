// SPDX-License-Identifier: Apache-2.0
#include "genomagent/eval/errors.hpp"

#include "genomagent/core/text.hpp"

namespace genomagent {

const char* error_class_name(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::None: return "None";
    case ErrorClass::E1: return "E1";
    case ErrorClass::E2: return "E2";
    case ErrorClass::E3: return "E3";
    case ErrorClass::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::vector<std::string> gold_search_strings(const GoldAnswer& gold) {
  std::vector<std::string> out;
  switch (gold_variant_of(gold)) {
    case GoldVariant::ExactText:
      out.push_back(trim(std::get<GoldAnswer::ExactText>(gold.value).text));
      break;
    case GoldVariant::Species:
      out.push_back(trim(std::get<GoldAnswer::Species>(gold.value).name));
      break;
    case GoldVariant::GeneSet:
      for (const std::string& symbol : std::get<GoldAnswer::GeneSet>(gold.value).symbols) {
        out.push_back(trim(symbol));
      }
      break;
    case GoldVariant::Interval:
      out.push_back(std::get<GoldAnswer::Interval>(gold.value).interval.chromosome);
      break;
  }
  return out;
}

namespace {

bool body_contains_insensitive(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  std::string h = to_lower_ascii(haystack);
  std::string n = to_lower_ascii(needle);
  return h.find(n) != std::string::npos;
}

}  // namespace

ErrorClass classify_error(const Transcript& transcript, double score, const GoldAnswer& gold,
                          const ErrorTaxonomyConfig& config) {
  if (score >= 1.0) return ErrorClass::None;

  // E2: malformed tool use — the loop ended with no usable call, a
  // generated program failed validation, or routing failed outright.
  if (transcript.termination == LoopTermination::NoApiCall) return ErrorClass::E2;
  for (const TranscriptEvent& event : transcript.events) {
    if (event.error_code == "ProgramInvalid" || event.error_code == "Unclassifiable" ||
        event.error_code == "NoApiCall") {
      return ErrorClass::E2;
    }
  }

  // E1: coverage gap — every call worked, nothing came back.
  bool any_api = false;
  bool all_ok = true;
  bool all_empty = true;
  std::size_t evidence_bytes = 0;
  for (const TranscriptEvent& event : transcript.events) {
    if (event.kind != EventKind::ApiCall) continue;
    any_api = true;
    all_ok = all_ok && event.ok;
    all_empty = all_empty && event.empty_result;
    evidence_bytes += event.payload_bytes;
  }
  if (any_api && all_ok && all_empty) return ErrorClass::E1;

  // E3: context loss — the answer was fetched but drowned in oversized
  // responses.
  if (evidence_bytes > config.context_budget_bytes) {
    for (const std::string& needle : gold_search_strings(gold)) {
      for (const TranscriptEvent& event : transcript.events) {
        if (event.kind == EventKind::ApiCall &&
            body_contains_insensitive(event.payload, needle)) {
          return ErrorClass::E3;
        }
      }
    }
  }
  return ErrorClass::Unclassified;
}

}  // namespace genomagent
