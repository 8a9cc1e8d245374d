// SPDX-License-Identifier: Apache-2.0
#include "genomagent/core/types.hpp"

#include <algorithm>
#include <cctype>

#include "genomagent/core/result.hpp"

namespace genomagent {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::HttpError: return "HttpError";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::RidNotFound: return "RidNotFound";
    case Errc::Timeout: return "Timeout";
    case Errc::JobFailed: return "JobFailed";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::ScriptExhausted: return "ScriptExhausted";
    case Errc::CassetteMiss: return "CassetteMiss";
    case Errc::FixtureMiss: return "FixtureMiss";
    case Errc::Unclassifiable: return "Unclassifiable";
    case Errc::AllSourcesFailed: return "AllSourcesFailed";
    case Errc::ExtractionFailed: return "ExtractionFailed";
    case Errc::PipelineMismatch: return "PipelineMismatch";
    case Errc::ProgramInvalid: return "ProgramInvalid";
    case Errc::NoEvidence: return "NoEvidence";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::VariantMismatch: return "VariantMismatch";
    case Errc::MissingTaskFile: return "MissingTaskFile";
    case Errc::GoldParseFailure: return "GoldParseFailure";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

TaskCategory category(TaskKind task) {
  switch (task) {
    case TaskKind::GeneAlias:
    case TaskKind::NameConversion:
      return TaskCategory::Nomenclature;
    case TaskKind::SnpAssociation:
    case TaskKind::GeneLocation:
    case TaskKind::SnpLocation:
      return TaskCategory::GenomicLocation;
    case TaskKind::DiseaseAssociation:
    case TaskKind::ProteinCodingGenes:
      return TaskCategory::FunctionalAnalysis;
    case TaskKind::DnaToHuman:
    case TaskKind::DnaToSpecies:
      return TaskCategory::SequenceAlignment;
  }
  return TaskCategory::Nomenclature;
}

const char* task_name(TaskKind task) {
  switch (task) {
    case TaskKind::GeneAlias: return "gene_alias";
    case TaskKind::NameConversion: return "gene_name_conversion";
    case TaskKind::SnpAssociation: return "snp_association";
    case TaskKind::GeneLocation: return "gene_location";
    case TaskKind::SnpLocation: return "snp_location";
    case TaskKind::DiseaseAssociation: return "disease_association";
    case TaskKind::ProteinCodingGenes: return "protein_coding_genes";
    case TaskKind::DnaToHuman: return "dna_to_human";
    case TaskKind::DnaToSpecies: return "dna_to_species";
  }
  return "unknown";
}

const char* task_label(TaskKind task) {
  switch (task) {
    case TaskKind::GeneAlias: return "Gene Alias";
    case TaskKind::NameConversion: return "Name Conversion";
    case TaskKind::SnpAssociation: return "SNP Association";
    case TaskKind::GeneLocation: return "Gene Location";
    case TaskKind::SnpLocation: return "SNP Location";
    case TaskKind::DiseaseAssociation: return "Disease Association";
    case TaskKind::ProteinCodingGenes: return "Protein-coding Genes";
    case TaskKind::DnaToHuman: return "DNA to Human";
    case TaskKind::DnaToSpecies: return "DNA to Species";
  }
  return "Unknown";
}

const char* category_name(TaskCategory cat) {
  switch (cat) {
    case TaskCategory::Nomenclature: return "Nomenclature";
    case TaskCategory::GenomicLocation: return "GenomicLocation";
    case TaskCategory::FunctionalAnalysis: return "FunctionalAnalysis";
    case TaskCategory::SequenceAlignment: return "SequenceAlignment";
  }
  return "Unknown";
}

std::optional<TaskKind> task_from_name(const std::string& name) {
  for (TaskKind task : kAllTasks) {
    if (name == task_name(task)) return task;
  }
  return std::nullopt;
}

GoldVariant gold_variant_for(TaskKind task) {
  switch (task) {
    case TaskKind::DiseaseAssociation:
      return GoldVariant::GeneSet;
    case TaskKind::DnaToHuman:
      return GoldVariant::Interval;
    case TaskKind::DnaToSpecies:
      return GoldVariant::Species;
    default:
      return GoldVariant::ExactText;
  }
}

GoldVariant gold_variant_of(const GoldAnswer& gold) {
  switch (gold.value.index()) {
    case 0: return GoldVariant::ExactText;
    case 1: return GoldVariant::GeneSet;
    case 2: return GoldVariant::Interval;
    default: return GoldVariant::Species;
  }
}

const char* source_name(SourceId source) {
  switch (source) {
    case SourceId::NCBI_EUTILS: return "NCBI_EUTILS";
    case SourceId::BLAST: return "BLAST";
    case SourceId::HGNC: return "HGNC";
    case SourceId::UCSC: return "UCSC";
  }
  return "UNKNOWN";
}

std::optional<SourceId> source_from_name(const std::string& name) {
  for (SourceId source : kAllSources) {
    if (name == source_name(source)) return source;
  }
  return std::nullopt;
}

const char* content_kind_name(ContentKind kind) {
  switch (kind) {
    case ContentKind::Json: return "JSON";
    case ContentKind::Html: return "HTML";
    case ContentKind::Xml: return "XML";
    case ContentKind::Text: return "TEXT";
  }
  return "TEXT";
}

namespace {

bool body_looks_like(const std::string& body, const char* prefix) {
  std::size_t i = 0;
  while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  std::size_t n = std::char_traits<char>::length(prefix);
  if (body.size() - i < n) return false;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::tolower(static_cast<unsigned char>(body[i + k])) != prefix[k]) return false;
  }
  return true;
}

}  // namespace

ContentKind infer_content_kind(const std::string& content_type,
                               const std::string& body) {
  std::string ct;
  ct.reserve(content_type.size());
  for (char c : content_type) ct.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  if (ct.find("json") != std::string::npos) return ContentKind::Json;
  if (ct.find("html") != std::string::npos) return ContentKind::Html;
  if (ct.find("xml") != std::string::npos) return ContentKind::Xml;

  // Sniff when the declared type is absent or generic (e.g. text/plain).
  if (body_looks_like(body, "{") || body_looks_like(body, "[")) return ContentKind::Json;
  if (body_looks_like(body, "<!doctype") || body_looks_like(body, "<html")) return ContentKind::Html;
  if (body_looks_like(body, "<?xml")) return ContentKind::Xml;
  if (body_looks_like(body, "<")) return ContentKind::Html;
  return ContentKind::Text;
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::LlmCall: return "LLM_CALL";
    case EventKind::ApiCall: return "API_CALL";
    case EventKind::Extraction: return "EXTRACTION";
    case EventKind::Decision: return "DECISION";
  }
  return "LLM_CALL";
}

const char* fail_reason_name(FailReason reason) {
  switch (reason) {
    case FailReason::None: return "None";
    case FailReason::Unclassifiable: return "Unclassifiable";
    case FailReason::AllSourcesFailed: return "AllSourcesFailed";
    case FailReason::NoEvidence: return "NoEvidence";
    case FailReason::BudgetExceeded: return "BudgetExceeded";
    case FailReason::NoApiCall: return "NoApiCall";
    case FailReason::MaxIterations: return "MaxIterations";
    case FailReason::EngineError: return "EngineError";
  }
  return "None";
}

}  // namespace genomagent
