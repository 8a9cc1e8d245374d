// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace genomagent {

// ---------------------------------------------------------------------------
// Tasks

enum class TaskKind {
  GeneAlias,
  NameConversion,
  SnpAssociation,
  GeneLocation,
  SnpLocation,
  DiseaseAssociation,
  ProteinCodingGenes,
  DnaToHuman,
  DnaToSpecies,
};

enum class TaskCategory {
  Nomenclature,
  GenomicLocation,
  FunctionalAnalysis,
  SequenceAlignment,
};

inline constexpr std::array<TaskKind, 9> kAllTasks = {
    TaskKind::GeneAlias,          TaskKind::NameConversion,
    TaskKind::SnpAssociation,     TaskKind::GeneLocation,
    TaskKind::SnpLocation,        TaskKind::DiseaseAssociation,
    TaskKind::ProteinCodingGenes, TaskKind::DnaToHuman,
    TaskKind::DnaToSpecies,
};

inline constexpr std::array<TaskCategory, 4> kAllCategories = {
    TaskCategory::Nomenclature,
    TaskCategory::GenomicLocation,
    TaskCategory::FunctionalAnalysis,
    TaskCategory::SequenceAlignment,
};

TaskCategory category(TaskKind task);
const char* task_name(TaskKind task);          // e.g. "gene_alias"
const char* task_label(TaskKind task);         // e.g. "Gene Alias"
const char* category_name(TaskCategory cat);   // e.g. "Nomenclature"
std::optional<TaskKind> task_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Questions and answers

struct Question {
  std::string id;
  TaskKind task = TaskKind::GeneAlias;
  std::string text;
};

struct GenomicInterval {
  std::string chromosome;  // canonical label, e.g. "chr8"
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  bool operator==(const GenomicInterval&) const = default;
};

/// Gold target for one benchmark item. The active alternative is dictated
/// by the item's TaskKind (see gold_variant_for).
struct GoldAnswer {
  struct ExactText {
    std::string text;
  };
  struct GeneSet {
    std::set<std::string> symbols;
  };
  struct Interval {
    GenomicInterval interval;
  };
  struct Species {
    std::string name;
  };

  std::variant<ExactText, GeneSet, Interval, Species> value;
};

enum class GoldVariant { ExactText, GeneSet, Interval, Species };

GoldVariant gold_variant_for(TaskKind task);
GoldVariant gold_variant_of(const GoldAnswer& gold);

struct Prediction {
  std::string raw;         // verbatim final answer
  std::string normalized;  // deterministic function of raw (see normalize_answer)
  std::string transcript_ref;
};

// ---------------------------------------------------------------------------
// Token and money accounting

struct TokenUsage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage lhs, const TokenUsage& rhs) {
    lhs += rhs;
    return lhs;
  }
  bool operator==(const TokenUsage&) const = default;
};

struct Pricing {
  double usd_per_million_prompt_tokens = 0.0;
  double usd_per_million_completion_tokens = 0.0;
  std::string model_label;
};

// ---------------------------------------------------------------------------
// API traffic

enum class SourceId { NCBI_EUTILS, BLAST, HGNC, UCSC };

inline constexpr std::array<SourceId, 4> kAllSources = {
    SourceId::NCBI_EUTILS, SourceId::BLAST, SourceId::HGNC, SourceId::UCSC};

const char* source_name(SourceId source);
std::optional<SourceId> source_from_name(const std::string& name);

enum class HttpMethod { Get, Post };

enum class ContentKind { Json, Html, Xml, Text };

const char* content_kind_name(ContentKind kind);

/// Infers the body kind from the declared content type, sniffing the body
/// as a fallback when the header is absent or generic.
ContentKind infer_content_kind(const std::string& content_type,
                               const std::string& body);

struct ApiRequest {
  SourceId source = SourceId::NCBI_EUTILS;
  HttpMethod method = HttpMethod::Get;
  std::string url;  // absolute
  std::string body;
};

struct ApiResponse {
  int status = 0;
  ContentKind content_kind = ContentKind::Text;
  std::string body;
  std::uint64_t latency_ms = 0;
};

// ---------------------------------------------------------------------------
// Transcripts

enum class EventKind { LlmCall, ApiCall, Extraction, Decision };

const char* event_kind_name(EventKind kind);

struct TranscriptEvent {
  std::string agent_id;
  EventKind kind = EventKind::LlmCall;
  std::string input_digest;
  std::string output_digest;
  TokenUsage usage;
  std::uint64_t wall_time_ms = 0;

  bool ok = true;            // the step itself succeeded
  bool empty_result = false; // step succeeded but yielded an empty result set
  std::string error_code;    // errc_name of the failure, when !ok
  std::size_t payload_bytes = 0;
  std::string payload;       // retained body text for post-hoc analysis
};

enum class Outcome { Answered, Failed };

enum class FailReason {
  None,
  Unclassifiable,
  AllSourcesFailed,
  NoEvidence,
  BudgetExceeded,
  NoApiCall,
  MaxIterations,
  EngineError,
};

const char* fail_reason_name(FailReason reason);

enum class LoopTermination { None, TerminationToken, MaxIterations, NoApiCall };

struct Transcript {
  std::string question_id;
  std::vector<TranscriptEvent> events;
  TokenUsage total_usage;
  Outcome outcome = Outcome::Failed;
  FailReason fail_reason = FailReason::None;
  LoopTermination termination = LoopTermination::None;
  std::int64_t cost_microusd = 0;  // cumulative, non-decreasing over events

  // Keeps total_usage equal to the component-wise sum of event usages.
  void add_event(TranscriptEvent event) {
    total_usage += event.usage;
    events.push_back(std::move(event));
  }
};

using EntityMap = std::map<std::string, std::string>;

}  // namespace genomagent
