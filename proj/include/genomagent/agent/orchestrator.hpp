// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genomagent/agent/dispatch.hpp"
#include "genomagent/agent/extraction.hpp"
#include "genomagent/agent/workflow.hpp"
#include "genomagent/core/engine.hpp"
#include "genomagent/core/result.hpp"
#include "genomagent/db/transport.hpp"
#include "genomagent/llm/gateway.hpp"

namespace genomagent {

struct Detected {
  TaskKind task = TaskKind::GeneAlias;
  EntityMap entities;
  bool used_llm = false;
};

/// Rule-based pre-classifier covering the unambiguous question shapes
/// (rs-ids, DNA runs, the stock benchmark phrasings). Returns nothing when
/// the question needs a model call.
std::optional<Detected> rule_classify(const std::string& text);

struct Evidence {
  SourceId source = SourceId::NCBI_EUTILS;
  std::string candidate;   // normalized answer
  std::string raw_answer;  // pre-normalization form
  std::vector<std::string> support;
  enum class Confidence { Parsed, LlmExtracted } confidence = Confidence::Parsed;
};

/// Per-question spend tracker. authorize() is checked before every model
/// call, so cumulative cost never exceeds budget plus the one in-flight
/// call at abort time.
class BudgetGate {
 public:
  BudgetGate(double budget_usd, Pricing pricing);

  Result<void> authorize() const;
  void charge(const TokenUsage& usage);
  std::int64_t spent_microusd() const { return spent_; }

 private:
  std::int64_t budget_micro_;
  Pricing pricing_;
  std::int64_t spent_ = 0;
};

struct OrchestratorConfig {
  std::shared_ptr<LlmBackend> llm;
  std::shared_ptr<HttpTransport> transport;
  std::map<TaskKind, WorkflowConfig> workflows;
  std::shared_ptr<ExtractionCache> cache = std::make_shared<ExtractionCache>();
  Pricing pricing;
  double budget_usd = 0.05;
  int parallelism = 4;
  std::chrono::milliseconds source_timeout{30000};
  int blast_max_polls = 30;
  std::chrono::milliseconds blast_poll_interval{0};
  int llm_max_tokens = 512;
  std::string eutils_base;  // empty = default endpoints
  std::string blast_base;
  std::string hgnc_base;
  std::string blat_base;
};

/// The coordinated pipeline: route the question, fan out to the configured
/// sources in parallel, normalize responses through the JSON/HTML dual
/// pipeline with a shared extractor cache, and synthesize one answer.
class Orchestrator : public QaEngine {
 public:
  explicit Orchestrator(OrchestratorConfig config);

  QaOutcome answer(const Question& question) override;

  // Pipeline stages, exposed for focused tests. All model calls pass the
  // budget gate and are recorded in the transcript.
  Result<Detected> detect_task(const std::string& text, Transcript& transcript,
                               BudgetGate& gate);
  Result<Evidence> handle_response(const SourceSpec& spec, const ApiResponse& response,
                                   TaskKind task, std::size_t json_size_threshold,
                                   Transcript& transcript, BudgetGate& gate);
  Result<ExtractionProgram> write_extractor(const std::string& sample,
                                            const std::string& target,
                                            Transcript& transcript, BudgetGate& gate);
  Result<Prediction> decide(const Question& question, const std::vector<Evidence>& evidence,
                            ConsensusPolicy policy, Transcript& transcript, BudgetGate& gate);

  /// Executes a SourceSpec through the typed clients over the configured
  /// transport (esearch+esummary chains, BLAST submit/poll, BLAT, raw GET).
  SourceRunner source_runner() const;

  BudgetGate make_gate() const { return BudgetGate(config_.budget_usd, config_.pricing); }
  const OrchestratorConfig& config() const { return config_; }

 private:
  Result<CompletionResult> llm_call(const CompletionRequest& request,
                                    const std::string& agent_id, Transcript& transcript,
                                    BudgetGate& gate);
  Result<Evidence> finish_evidence(const SourceSpec& spec, std::vector<std::string> values,
                                   TaskKind task, Evidence::Confidence confidence);

  OrchestratorConfig config_;
};

/// Heuristic for "the call succeeded but found nothing" over the known
/// response shapes; drives E1 classification downstream.
bool looks_empty_result(const ApiResponse& response);

}  // namespace genomagent
