// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <regex>

#include <nlohmann/json.hpp>

#include "genomagent/agent/schema.hpp"
#include "genomagent/core/digest.hpp"
#include "genomagent/core/text.hpp"
#include "genomagent/db/clients.hpp"

namespace genomagent {

using nlohmann::json;

namespace {

constexpr const char* kRouterSystem =
    "You route genomics questions. Reply with JSON only: "
    "{\"task\": \"<label>\", \"entities\": {...}}. Labels: gene_alias, "
    "gene_name_conversion, snp_association, gene_location, snp_location, "
    "disease_association, protein_coding_genes, dna_to_human, dna_to_species. "
    "Entity keys: gene, rsid, disease, sequence, ensembl_id, query.";

constexpr const char* kDirectExtractSystem =
    "You extract one value from an API response. Reply with the value only, "
    "no explanation.";

constexpr const char* kPathExtractSystem =
    "Given a schema summary of a large JSON response, reply with one JSON "
    "path (starting with $) that selects the requested value. Reply with the "
    "path only.";

constexpr const char* kWriterSystem =
    "You write declarative extraction programs. Available instructions: "
    "SelectCss(\"selector\"), SelectPath(\"$.path\"), Nth(index), First, "
    "Text, Attr(\"name\"), RegexCapture(\"pattern\", group). Reply with a "
    "comma-separated extraction program only.";

std::string strip_reply_fence(const std::string& text) {
  std::string s = trim(text);
  if (s.rfind("```", 0) == 0) {
    auto first_newline = s.find('\n');
    if (first_newline != std::string::npos) s.erase(0, first_newline + 1);
    auto closing = s.rfind("```");
    if (closing != std::string::npos) s.erase(closing);
    s = trim(s);
  }
  return s;
}

std::uint64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count());
}

// Longest run of uppercase DNA letters; questions quote sequences verbatim.
std::string find_dna_run(const std::string& text, std::size_t min_length) {
  std::string best;
  std::string current;
  for (char c : text) {
    if (c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == 'N') {
      current.push_back(c);
    } else {
      if (current.size() > best.size()) best = current;
      current.clear();
    }
  }
  if (current.size() > best.size()) best = current;
  if (best.size() < min_length) return {};
  return best;
}

std::string capture(const std::string& text, const std::regex& re, int group = 1) {
  std::smatch m;
  if (std::regex_search(text, m, re)) return trim(m[static_cast<std::size_t>(group)].str());
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Rule-based routing

std::optional<Detected> rule_classify(const std::string& text) {
  Detected detected;
  std::string lower = to_lower_ascii(text);

  if (std::string sequence = find_dna_run(text, 20); !sequence.empty()) {
    detected.entities["sequence"] = sequence;
    bool species = lower.find("organism") != std::string::npos ||
                   lower.find("species") != std::string::npos ||
                   lower.find("come from") != std::string::npos;
    detected.task = species ? TaskKind::DnaToSpecies : TaskKind::DnaToHuman;
    return detected;
  }

  static const std::regex ensembl_re(R"((ENSG[0-9]{6,}))");
  if (std::string id = capture(text, ensembl_re); !id.empty()) {
    detected.task = TaskKind::NameConversion;
    detected.entities["ensembl_id"] = id;
    detected.entities["query"] = id;
    return detected;
  }

  static const std::regex rsid_re(R"((rs[0-9]+))");
  if (std::string rsid = capture(text, rsid_re); !rsid.empty()) {
    detected.entities["rsid"] = rsid;
    detected.entities["rsid_number"] = rsid.substr(2);
    bool location = lower.find("chromosome") != std::string::npos ||
                    lower.find("locat") != std::string::npos;
    detected.task = location ? TaskKind::SnpLocation : TaskKind::SnpAssociation;
    return detected;
  }

  static const std::regex protein_re(R"([Ii]s\s+([A-Za-z0-9\-_.]+)\s+a\s+protein[- ]coding gene)");
  if (std::string gene = capture(text, protein_re); !gene.empty()) {
    detected.task = TaskKind::ProteinCodingGenes;
    detected.entities["gene"] = gene;
    return detected;
  }

  static const std::regex disease_re(R"([Gg]enes (?:that are )?(?:related to|associated with) ([^?.]+))");
  if (std::string disease = capture(text, disease_re); !disease.empty()) {
    detected.task = TaskKind::DiseaseAssociation;
    detected.entities["disease"] = disease;
    return detected;
  }

  static const std::regex alias_re(
      R"([Oo]fficial (?:gene )?symbol (?:of|for) ([A-Za-z0-9\-_.]+))");
  if (std::string gene = capture(text, alias_re); !gene.empty()) {
    detected.task = TaskKind::GeneAlias;
    detected.entities["gene"] = gene;
    return detected;
  }

  static const std::regex location_re(
      R"([Cc]hromosome (?:is|does) (?:gene )?([A-Za-z0-9\-_.]+) (?:gene )?locat)");
  if (std::string gene = capture(text, location_re); !gene.empty()) {
    detected.task = TaskKind::GeneLocation;
    detected.entities["gene"] = gene;
    return detected;
  }
  static const std::regex location_of_re(R"([Ll]ocation of (?:the )?(?:gene )?([A-Za-z0-9\-_.]+))");
  if (lower.find("chromosome") != std::string::npos || lower.find("location") != std::string::npos) {
    if (std::string gene = capture(text, location_of_re); !gene.empty()) {
      detected.task = TaskKind::GeneLocation;
      detected.entities["gene"] = gene;
      return detected;
    }
  }

  return std::nullopt;
}

// ---------------------------------------------------------------------------
// BudgetGate

BudgetGate::BudgetGate(double budget_usd, Pricing pricing)
    : budget_micro_(static_cast<std::int64_t>(budget_usd * 1e6)), pricing_(std::move(pricing)) {}

Result<void> BudgetGate::authorize() const {
  if (spent_ >= budget_micro_) {
    return make_error(Errc::BudgetExceeded,
                      "spent " + std::to_string(spent_) + " uUSD of " +
                          std::to_string(budget_micro_) + " uUSD budget");
  }
  return {};
}

void BudgetGate::charge(const TokenUsage& usage) {
  spent_ += cost_microusd(usage, pricing_);
}

// ---------------------------------------------------------------------------
// Orchestrator

Orchestrator::Orchestrator(OrchestratorConfig config) : config_(std::move(config)) {
  if (!config_.cache) config_.cache = std::make_shared<ExtractionCache>();
}

Result<CompletionResult> Orchestrator::llm_call(const CompletionRequest& request,
                                                const std::string& agent_id,
                                                Transcript& transcript, BudgetGate& gate) {
  TranscriptEvent event;
  event.agent_id = agent_id;
  event.kind = EventKind::LlmCall;
  event.input_digest = content_digest(request.system_prompt + "\n" + request.user_prompt);

  if (auto auth = gate.authorize(); !auth.ok()) {
    event.ok = false;
    event.error_code = errc_name(auth.error().code);
    transcript.add_event(std::move(event));
    return auth.error();
  }

  auto started = std::chrono::steady_clock::now();
  auto result = config_.llm->complete(request);
  event.wall_time_ms = elapsed_ms(started);

  if (!result.ok()) {
    event.ok = false;
    event.error_code = errc_name(result.error().code);
    transcript.add_event(std::move(event));
    return result;
  }

  event.output_digest = content_digest(result.value().text);
  event.usage = result.value().usage;
  gate.charge(result.value().usage);
  transcript.cost_microusd = gate.spent_microusd();
  transcript.add_event(std::move(event));
  return result;
}

Result<Detected> Orchestrator::detect_task(const std::string& text, Transcript& transcript,
                                           BudgetGate& gate) {
  if (trim(text).empty()) {
    return make_error(Errc::InvalidArgument, "question text is empty");
  }
  if (auto detected = rule_classify(text)) {
    return *detected;
  }

  CompletionRequest request;
  request.system_prompt = kRouterSystem;
  request.user_prompt = text;
  request.max_tokens = config_.llm_max_tokens;
  auto completion = llm_call(request, "router", transcript, gate);
  if (!completion.ok()) return completion.error();

  json doc = json::parse(strip_reply_fence(completion.value().text), nullptr, false);
  auto unclassifiable = [&](const std::string& why) -> Result<Detected> {
    TranscriptEvent event;
    event.agent_id = "router";
    event.kind = EventKind::Decision;
    event.ok = false;
    event.error_code = errc_name(Errc::Unclassifiable);
    transcript.add_event(std::move(event));
    return make_error(Errc::Unclassifiable, why);
  };
  if (doc.is_discarded() || !doc.is_object()) {
    return unclassifiable("router reply is not JSON");
  }
  auto task = task_from_name(doc.value("task", ""));
  if (!task) {
    return unclassifiable("router reply names no valid task: " + doc.value("task", ""));
  }

  Detected detected;
  detected.task = *task;
  detected.used_llm = true;
  if (doc.contains("entities") && doc["entities"].is_object()) {
    for (const auto& [key, value] : doc["entities"].items()) {
      if (value.is_string()) detected.entities[key] = value.get<std::string>();
    }
  }
  return detected;
}

Result<Evidence> Orchestrator::finish_evidence(const SourceSpec& spec,
                                               std::vector<std::string> values, TaskKind task,
                                               Evidence::Confidence confidence) {
  for (std::string& value : values) {
    value = trim(value);
    auto mapped = spec.value_map.find(value);
    if (mapped != spec.value_map.end()) value = mapped->second;
  }
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](const std::string& v) { return v.empty(); }),
               values.end());
  if (values.empty()) {
    return make_error(Errc::ExtractionFailed, "extraction produced no usable values");
  }

  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) joined += ", ";
    joined += values[i];
  }

  Evidence evidence;
  evidence.source = spec.source;
  evidence.raw_answer = joined;
  evidence.candidate = normalize_answer(joined, task);
  evidence.support = std::move(values);
  evidence.confidence = confidence;
  if (evidence.candidate.empty()) {
    return make_error(Errc::ExtractionFailed, "candidate normalized to nothing");
  }
  return evidence;
}

Result<ExtractionProgram> Orchestrator::write_extractor(const std::string& sample,
                                                        const std::string& target,
                                                        Transcript& transcript,
                                                        BudgetGate& gate) {
  CompletionRequest request;
  request.system_prompt = kWriterSystem;
  request.user_prompt = "Target: " + target + "\n\nSample response:\n" + sample;
  request.max_tokens = config_.llm_max_tokens;

  std::string validation_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    CompletionRequest attempt_request = request;
    if (attempt == 1) {
      attempt_request.user_prompt +=
          "\n\nYour previous program was invalid: " + validation_error +
          "\nReply with a corrected program only.";
    }
    auto completion = llm_call(attempt_request, "extractor_writer", transcript, gate);
    if (!completion.ok()) return completion.error();

    auto program = parse_program(completion.value().text);
    if (program.ok()) {
      program.value().target_description = target;
      return program;
    }
    validation_error = program.error().message;
  }

  TranscriptEvent event;
  event.agent_id = "extractor_writer";
  event.kind = EventKind::Extraction;
  event.ok = false;
  event.error_code = errc_name(Errc::ProgramInvalid);
  transcript.add_event(std::move(event));
  return make_error(Errc::ProgramInvalid,
                    "extractor invalid after retry: " + validation_error);
}

Result<Evidence> Orchestrator::handle_response(const SourceSpec& spec,
                                               const ApiResponse& response, TaskKind task,
                                               std::size_t json_size_threshold,
                                               Transcript& transcript, BudgetGate& gate) {
  auto record_extraction = [&](const std::string& agent, bool ok, const std::string& out,
                               const char* error_code = nullptr) {
    TranscriptEvent event;
    event.agent_id = agent;
    event.kind = EventKind::Extraction;
    event.input_digest = content_digest(response.body);
    event.output_digest = content_digest(out);
    event.ok = ok;
    if (error_code != nullptr) event.error_code = error_code;
    transcript.add_event(std::move(event));
  };

  if (spec.route == ResponseRoute::Json) {
    if (response.content_kind != ContentKind::Json) {
      record_extraction("response_handler", false, "", errc_name(Errc::PipelineMismatch));
      return make_error(Errc::PipelineMismatch,
                        std::string("JSON route got ") + content_kind_name(response.content_kind));
    }

    // LLM-free structured lookup when the workflow pins a binding path.
    if (!spec.bind.empty()) {
      ExtractionProgram program;
      program.instructions.push_back({Instruction::Op::SelectPath, spec.bind, 0});
      auto values = execute_program(program, response.body, ContentKind::Json);
      if (!values.ok()) {
        record_extraction("response_handler", false, "", errc_name(values.error().code));
        return values.error();
      }
      auto evidence = finish_evidence(spec, std::move(values.value()), task,
                                      Evidence::Confidence::Parsed);
      if (evidence.ok()) record_extraction("response_handler", true, evidence.value().candidate);
      return evidence;
    }

    if (response.body.size() <= json_size_threshold) {
      CompletionRequest request;
      request.system_prompt = kDirectExtractSystem;
      request.user_prompt = "Value wanted: " + spec.target + "\n\nResponse:\n" + response.body;
      request.max_tokens = config_.llm_max_tokens;
      auto completion = llm_call(request, "response_handler", transcript, gate);
      if (!completion.ok()) return completion.error();
      std::string value = strip_reply_fence(completion.value().text);
      return finish_evidence(spec, {value}, task, Evidence::Confidence::LlmExtracted);
    }

    // Oversized body: summarize the shape first, then ask for one path.
    json doc = json::parse(response.body, nullptr, false);
    if (doc.is_discarded()) {
      record_extraction("response_handler", false, "", errc_name(Errc::ExtractionFailed));
      return make_error(Errc::ExtractionFailed, "oversized body is not valid JSON");
    }
    SchemaSummary summary = summarize_schema(doc, json_size_threshold / 4);
    std::string summary_text = summary.to_text();
    {
      TranscriptEvent event;
      event.agent_id = "feature_extractor";
      event.kind = EventKind::Extraction;
      event.input_digest = content_digest(response.body);
      event.output_digest = content_digest(summary_text);
      event.payload_bytes = summary_text.size();
      transcript.add_event(std::move(event));
    }

    CompletionRequest request;
    request.system_prompt = kPathExtractSystem;
    request.user_prompt =
        "Value wanted: " + spec.target + "\n\nSchema summary:\n" + summary_text;
    request.max_tokens = config_.llm_max_tokens;
    auto completion = llm_call(request, "feature_extractor", transcript, gate);
    if (!completion.ok()) return completion.error();

    std::string reply = strip_reply_fence(completion.value().text);
    ExtractionProgram program;
    if (auto parsed = parse_program(reply); parsed.ok()) {
      program = std::move(parsed.value());
    } else {
      program.instructions.push_back({Instruction::Op::SelectPath, reply, 0});
      if (auto check = validate_program(program); !check.ok()) {
        record_extraction("feature_extractor", false, "", errc_name(Errc::ExtractionFailed));
        return make_error(Errc::ExtractionFailed, "model returned no usable path: " + reply);
      }
    }
    auto values = execute_program(program, response.body, ContentKind::Json);
    if (!values.ok()) {
      record_extraction("feature_extractor", false, "", errc_name(values.error().code));
      return values.error();
    }
    return finish_evidence(spec, std::move(values.value()), task,
                           Evidence::Confidence::LlmExtracted);
  }

  // HTML pipeline.
  if (response.content_kind != ContentKind::Html) {
    record_extraction("response_handler", false, "", errc_name(Errc::PipelineMismatch));
    return make_error(Errc::PipelineMismatch,
                      std::string("HTML route got ") + content_kind_name(response.content_kind));
  }

  std::string fingerprint = structure_fingerprint(response.body, ContentKind::Html);
  std::string key = ExtractionCache::make_key(spec.source, spec.endpoint_key(), fingerprint);

  bool fresh_program = false;
  ExtractionProgram program;
  if (auto cached = config_.cache->lookup(key)) {
    program = std::move(*cached);
  } else {
    std::string sample = response.body.size() > 8192 ? response.body.substr(0, 8192)
                                                     : response.body;
    auto written = write_extractor(sample, spec.target, transcript, gate);
    if (!written.ok()) return written.error();
    program = std::move(written.value());
    fresh_program = true;
  }

  auto values = execute_program(program, response.body, ContentKind::Html);
  if (!values.ok()) {
    record_extraction("extractor_runner", false, "", errc_name(values.error().code));
    return values.error();
  }
  if (fresh_program) config_.cache->store(key, program);
  record_extraction("extractor_runner", true, values.value().empty() ? "" : values.value()[0]);
  return finish_evidence(spec, std::move(values.value()), task,
                         fresh_program ? Evidence::Confidence::LlmExtracted
                                       : Evidence::Confidence::Parsed);
}

Result<Prediction> Orchestrator::decide(const Question& question,
                                        const std::vector<Evidence>& evidence,
                                        ConsensusPolicy policy, Transcript& transcript,
                                        BudgetGate& gate) {
  if (evidence.empty()) {
    TranscriptEvent event;
    event.agent_id = "decider";
    event.kind = EventKind::Decision;
    event.ok = false;
    event.error_code = errc_name(Errc::NoEvidence);
    transcript.add_event(std::move(event));
    return make_error(Errc::NoEvidence, "no evidence to decide over");
  }

  std::string raw;
  std::string winner;
  std::string tally_text;

  if (policy == ConsensusPolicy::LlmSynthesis) {
    std::string candidates;
    for (const Evidence& item : evidence) {
      candidates += std::string(source_name(item.source)) + ": " + item.candidate + "\n";
    }
    CompletionRequest request;
    request.system_prompt =
        "Combine the candidate answers into one final answer. Reply with the "
        "answer only.";
    request.user_prompt = "Question: " + question.text + "\n\nCandidates:\n" + candidates;
    request.max_tokens = config_.llm_max_tokens;
    auto completion = llm_call(request, "decider", transcript, gate);
    if (!completion.ok()) return completion.error();
    raw = strip_reply_fence(completion.value().text);
    winner = normalize_answer(raw, question.task);
    tally_text = "llm_synthesis over " + std::to_string(evidence.size()) + " candidates";
  } else {
    // Group by normalized candidate; strict majority wins, otherwise fall
    // back to the highest-priority source (workflow order).
    std::map<std::string, std::size_t> tally;
    for (const Evidence& item : evidence) ++tally[item.candidate];

    for (const auto& [candidate, count] : tally) {
      if (count * 2 > evidence.size()) {
        winner = candidate;
        break;
      }
    }
    if (winner.empty()) winner = evidence.front().candidate;

    for (const Evidence& item : evidence) {
      if (item.candidate == winner) {
        raw = item.raw_answer;
        break;
      }
    }
    for (const auto& [candidate, count] : tally) {
      tally_text += candidate + "=" + std::to_string(count) + "; ";
    }
  }

  TranscriptEvent event;
  event.agent_id = "decider";
  event.kind = EventKind::Decision;
  event.input_digest = content_digest(tally_text);
  event.output_digest = content_digest(winner);
  event.payload = tally_text;
  event.payload_bytes = tally_text.size();
  transcript.add_event(std::move(event));

  Prediction prediction;
  prediction.raw = raw;
  prediction.normalized = normalize_answer(raw, question.task);
  prediction.transcript_ref = question.id;
  return prediction;
}

// ---------------------------------------------------------------------------
// Source execution

bool looks_empty_result(const ApiResponse& response) {
  if (response.content_kind != ContentKind::Json) return trim(response.body).empty();
  json doc = json::parse(response.body, nullptr, false);
  if (doc.is_discarded()) return false;

  if (doc.contains("esearchresult") && doc["esearchresult"].contains("idlist")) {
    return doc["esearchresult"]["idlist"].empty();
  }
  if (doc.contains("result") && doc["result"].is_object() && doc["result"].contains("uids")) {
    return doc["result"]["uids"].empty();
  }
  if (doc.contains("hits")) return doc["hits"].empty();
  if (doc.contains("blat")) return doc["blat"].empty();
  if (doc.contains("response") && doc["response"].is_object() &&
      doc["response"].contains("docs")) {
    return doc["response"]["docs"].empty();
  }
  return false;
}

namespace {

json hits_to_json(const std::vector<AlignmentHit>& hits) {
  json rows = json::array();
  for (const AlignmentHit& hit : hits) {
    rows.push_back({
        {"chromosome", hit.chromosome},
        {"start", hit.start},
        {"end", hit.end},
        {"organism", hit.organism},
        {"score", hit.score},
        {"region", hit.region()},
    });
  }
  return json{{"hits", rows}};
}

ApiResponse json_response(const json& doc) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Json;
  response.body = doc.dump();
  return response;
}

}  // namespace

SourceRunner Orchestrator::source_runner() const {
  auto transport = config_.transport;
  std::string eutils_base =
      config_.eutils_base.empty() ? kDefaultEutilsBase : config_.eutils_base;
  std::string blast_base = config_.blast_base.empty() ? kDefaultBlastBase : config_.blast_base;
  std::string hgnc_base = config_.hgnc_base.empty() ? kDefaultHgncBase : config_.hgnc_base;
  std::string blat_base = config_.blat_base.empty() ? kDefaultBlatBase : config_.blat_base;
  int blast_max_polls = config_.blast_max_polls;
  auto blast_interval = config_.blast_poll_interval;

  return [=](const SourceSpec& spec, const EntityMap& entities) -> Result<ApiResponse> {
    EntityMap bound;
    for (const auto& [name, tmpl] : spec.params) {
      auto value = bind_template(tmpl, entities);
      if (!value.ok()) return value.error();
      bound[name] = value.value();
    }

    if (spec.op == "http_get") {
      auto url = bind_template(spec.url, entities);
      if (!url.ok()) return url.error();
      ApiRequest request;
      request.source = spec.source;
      request.url = url.value();
      return transport->send(request);
    }

    if (spec.op == "eutils_search_summary" || spec.op == "eutils_summary") {
      EutilsClient client(transport, eutils_base);
      std::string db = bound.contains("db") ? bound.at("db") : "gene";
      std::vector<std::string> ids;
      if (spec.op == "eutils_summary") {
        if (!bound.contains("id")) {
          return make_error(Errc::InvalidArgument, "eutils_summary requires an id param");
        }
        ids.push_back(bound.at("id"));
      } else {
        if (!bound.contains("term")) {
          return make_error(Errc::InvalidArgument, "eutils_search_summary requires a term param");
        }
        auto found = client.search(db, bound.at("term"));
        if (!found.ok()) return found.error();
        ids = std::move(found.value());
        if (ids.empty()) {
          // A clean no-hit answer: synthesize the empty esummary shape so
          // downstream stages see "succeeded, found nothing".
          return json_response(json{{"result", json{{"uids", json::array()}}}});
        }
        if (ids.size() > 5) ids.resize(5);
      }
      auto summary = client.summary(db, ids);
      if (!summary.ok()) return summary.error();
      return json_response(summary.value());
    }

    if (spec.op == "blast_align") {
      if (!bound.contains("sequence")) {
        return make_error(Errc::InvalidArgument, "blast_align requires a sequence param");
      }
      BlastClient client(transport, blast_base);
      std::string program = bound.contains("program") ? bound.at("program") : "megablast";
      std::string database = bound.contains("database") ? bound.at("database") : "core_nt";
      auto job = client.submit(bound.at("sequence"), program, database);
      if (!job.ok()) return job.error();
      auto hits = client.poll(job.value(), blast_max_polls, blast_interval);
      if (!hits.ok()) return hits.error();
      return json_response(hits_to_json(hits.value()));
    }

    if (spec.op == "ucsc_blat") {
      if (!bound.contains("sequence")) {
        return make_error(Errc::InvalidArgument, "ucsc_blat requires a sequence param");
      }
      UcscClient client(transport, blat_base);
      auto hits = client.blat(bound.at("sequence"));
      if (!hits.ok()) return hits.error();
      return json_response(hits_to_json(hits.value()));
    }

    if (spec.op == "hgnc_fetch") {
      HgncClient client(transport, hgnc_base);
      if (!bound.contains("field") || !bound.contains("value")) {
        return make_error(Errc::InvalidArgument, "hgnc_fetch requires field and value params");
      }
      ApiRequest request;
      request.source = SourceId::HGNC;
      request.url = hgnc_base + "fetch/" + bound.at("field") + "/" + url_encode(bound.at("value"));
      return transport->send(request);
    }

    return make_error(Errc::InvalidArgument, "unknown source op: " + spec.op);
  };
}

// ---------------------------------------------------------------------------
// End-to-end composition

QaOutcome Orchestrator::answer(const Question& question) {
  Transcript transcript;
  transcript.question_id = question.id;
  BudgetGate gate = make_gate();

  Prediction empty_prediction;
  empty_prediction.transcript_ref = question.id;

  auto failed = [&](FailReason reason) {
    transcript.outcome = Outcome::Failed;
    transcript.fail_reason = reason;
    return QaOutcome{empty_prediction, std::move(transcript)};
  };
  auto reason_for = [](Errc code) {
    switch (code) {
      case Errc::BudgetExceeded: return FailReason::BudgetExceeded;
      case Errc::Unclassifiable: return FailReason::Unclassifiable;
      case Errc::NoEvidence: return FailReason::NoEvidence;
      case Errc::AllSourcesFailed: return FailReason::AllSourcesFailed;
      default: return FailReason::EngineError;
    }
  };

  try {
    auto detected = detect_task(question.text, transcript, gate);
    if (!detected.ok()) {
      auto code = detected.error().code;
      return failed(code == Errc::InvalidArgument ? FailReason::Unclassifiable
                                                  : reason_for(code));
    }

    auto workflow_it = config_.workflows.find(detected.value().task);
    if (workflow_it == config_.workflows.end()) {
      return failed(FailReason::EngineError);
    }
    const WorkflowConfig& workflow = workflow_it->second;

    DispatchOptions options;
    options.parallelism = config_.parallelism;
    options.per_source_timeout = config_.source_timeout;

    auto outcomes = dispatch(workflow, detected.value().entities, source_runner(), options);
    if (!outcomes.ok()) {
      return failed(FailReason::EngineError);
    }

    for (const SourceOutcome& outcome : outcomes.value()) {
      TranscriptEvent event;
      event.agent_id = "dispatcher";
      event.kind = EventKind::ApiCall;
      const SourceSpec& spec = workflow.sources[outcome.source_index];
      event.input_digest = content_digest(spec.endpoint_key());
      if (outcome.response.ok()) {
        const ApiResponse& response = outcome.response.value();
        event.output_digest = content_digest(response.body);
        event.payload = response.body;
        event.payload_bytes = response.body.size();
        event.empty_result = looks_empty_result(response);
        event.wall_time_ms = response.latency_ms;
      } else {
        event.ok = false;
        event.error_code = errc_name(outcome.response.error().code);
      }
      transcript.add_event(std::move(event));
    }

    if (all_sources_failed(outcomes.value())) {
      return failed(FailReason::AllSourcesFailed);
    }

    std::vector<Evidence> evidence;
    for (const SourceOutcome& outcome : outcomes.value()) {
      if (!outcome.response.ok()) continue;
      auto item = handle_response(workflow.sources[outcome.source_index],
                                  outcome.response.value(), detected.value().task,
                                  workflow.json_size_threshold, transcript, gate);
      if (!item.ok()) {
        if (item.error().code == Errc::BudgetExceeded) {
          return failed(FailReason::BudgetExceeded);
        }
        continue;  // a failed source never aborts the others
      }
      evidence.push_back(std::move(item.value()));
    }

    auto prediction =
        decide(question, evidence, workflow.consensus, transcript, gate);
    if (!prediction.ok()) {
      return failed(reason_for(prediction.error().code));
    }

    transcript.outcome = Outcome::Answered;
    transcript.fail_reason = FailReason::None;
    return QaOutcome{std::move(prediction.value()), std::move(transcript)};
  } catch (const std::exception&) {
    return failed(FailReason::EngineError);
  }
}

}  // namespace genomagent
