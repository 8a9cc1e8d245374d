// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "genomagent/agent/orchestrator.hpp"
#include "genomagent/db/clients.hpp"
#include "genomagent/eval/errors.hpp"

using namespace genomagent;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

ApiResponse json_ok(const json& body) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Json;
  response.body = body.dump();
  return response;
}

ApiResponse html_ok(const std::string& body) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Html;
  response.body = body;
  return response;
}

WorkflowConfig stub_workflow(std::size_t sources) {
  WorkflowConfig config;
  config.task = TaskKind::GeneLocation;
  for (std::size_t i = 0; i < sources; ++i) {
    SourceSpec spec;
    spec.source = SourceId::NCBI_EUTILS;
    spec.op = "stub";
    spec.target = "value";
    config.sources.push_back(spec);
  }
  return config;
}

std::shared_ptr<MockLlm> mock_llm(std::vector<MockEntry> entries) {
  MockScript script;
  script.entries = std::move(entries);
  return std::make_shared<MockLlm>(std::move(script));
}

Orchestrator make_orchestrator(std::shared_ptr<LlmBackend> llm,
                               std::shared_ptr<ExtractionCache> cache = nullptr) {
  OrchestratorConfig config;
  config.llm = std::move(llm);
  config.pricing = Pricing{0.15, 0.60, "test"};
  config.budget_usd = 0.05;
  if (cache) config.cache = std::move(cache);
  return Orchestrator(std::move(config));
}

}  // namespace

// ---------------------------------------------------------------------------
// Task routing

TEST_CASE("rule classifier handles the unambiguous patterns") {
  auto location = rule_classify("Which chromosome is gene SNAP25 located on in the human genome?");
  REQUIRE(location.has_value());
  CHECK(location->task == TaskKind::GeneLocation);
  CHECK(location->entities.at("gene") == "SNAP25");

  auto snp = rule_classify("Which gene is SNP rs1217074595 associated with?");
  REQUIRE(snp.has_value());
  CHECK(snp->task == TaskKind::SnpAssociation);
  CHECK(snp->entities.at("rsid") == "rs1217074595");

  std::string sequence(100, 'A');
  auto align = rule_classify("Align the DNA sequence to the human genome: " + sequence);
  REQUIRE(align.has_value());
  CHECK(align->task == TaskKind::DnaToHuman);
  CHECK(align->entities.at("sequence") == sequence);

  auto species = rule_classify("Which organism does the DNA sequence come from: " + sequence);
  REQUIRE(species.has_value());
  CHECK(species->task == TaskKind::DnaToSpecies);

  auto snp_location =
      rule_classify("Which chromosome does SNP rs1430464868 locate on the human genome?");
  REQUIRE(snp_location.has_value());
  CHECK(snp_location->task == TaskKind::SnpLocation);

  auto alias = rule_classify("What is the official gene symbol of LMP10?");
  REQUIRE(alias.has_value());
  CHECK(alias->task == TaskKind::GeneAlias);
  CHECK(alias->entities.at("gene") == "LMP10");

  auto conversion = rule_classify("Convert ENSG00000205403 to its official gene symbol.");
  REQUIRE(conversion.has_value());
  CHECK(conversion->task == TaskKind::NameConversion);
  CHECK(conversion->entities.at("ensembl_id") == "ENSG00000205403");

  auto protein = rule_classify("Is LRRC32 a protein-coding gene?");
  REQUIRE(protein.has_value());
  CHECK(protein->task == TaskKind::ProteinCodingGenes);

  auto disease = rule_classify("What are genes related to Distal renal tubular acidosis?");
  REQUIRE(disease.has_value());
  CHECK(disease->task == TaskKind::DiseaseAssociation);
  CHECK(disease->entities.at("disease") == "Distal renal tubular acidosis");

  CHECK(!rule_classify("Tell me something interesting about biology.").has_value());
}

TEST_CASE("detect_task falls back to one model call and validates its reply") {
  auto orchestrator = make_orchestrator(mock_llm({
      {.index = {},
       .substring = {},
       .response = R"({"task": "gene_location", "entities": {"gene": "TP53"}})"},
  }));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  auto detected = orchestrator.detect_task("Where in the genome can TP53 be found?",
                                           transcript, gate);
  REQUIRE(detected.ok());
  CHECK(detected.value().task == TaskKind::GeneLocation);
  CHECK(detected.value().entities.at("gene") == "TP53");
  CHECK(detected.value().used_llm);
  REQUIRE(transcript.events.size() == 1);
  CHECK(transcript.events[0].kind == EventKind::LlmCall);
}

TEST_CASE("unparseable router replies are Unclassifiable") {
  auto orchestrator = make_orchestrator(mock_llm({
      {.index = {}, .substring = {}, .response = "no json here"},
  }));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();
  auto detected = orchestrator.detect_task("Where is TP53?", transcript, gate);
  REQUIRE(!detected.ok());
  CHECK(detected.error().code == Errc::Unclassifiable);

  bool saw_marker = false;
  for (const auto& event : transcript.events) {
    if (event.error_code == "Unclassifiable") saw_marker = true;
  }
  CHECK(saw_marker);
}

// ---------------------------------------------------------------------------
// Dispatch

TEST_CASE("dispatch runs sources in parallel under the bound") {
  auto config = stub_workflow(3);
  SourceRunner runner = [](const SourceSpec&, const EntityMap&) -> Result<ApiResponse> {
    std::this_thread::sleep_for(100ms);
    return json_ok(json{{"ok", true}});
  };

  DispatchOptions parallel;
  parallel.parallelism = 4;
  auto started = std::chrono::steady_clock::now();
  auto outcomes = dispatch(config, {}, runner, parallel);
  auto wall = std::chrono::steady_clock::now() - started;
  REQUIRE(outcomes.ok());
  CHECK(outcomes.value().size() == 3);
  CHECK(wall < 250ms);  // three 100 ms sleeps overlapped

  DispatchOptions serial;
  serial.parallelism = 1;
  started = std::chrono::steady_clock::now();
  outcomes = dispatch(config, {}, runner, serial);
  wall = std::chrono::steady_clock::now() - started;
  REQUIRE(outcomes.ok());
  CHECK(wall >= 300ms);  // forced serial execution
}

TEST_CASE("one failing source never disturbs the others; order is preserved") {
  auto config = stub_workflow(3);
  config.sources[1].target = "poison";
  SourceRunner runner = [](const SourceSpec& spec, const EntityMap&) -> Result<ApiResponse> {
    if (spec.target == "poison") {
      return make_error(Errc::HttpError, "HTTP 500");
    }
    return json_ok(json{{"v", spec.target}});
  };

  auto outcomes = dispatch(config, {}, runner, {});
  REQUIRE(outcomes.ok());
  REQUIRE(outcomes.value().size() == 3);
  CHECK(outcomes.value()[0].response.ok());
  CHECK(!outcomes.value()[1].response.ok());
  CHECK(outcomes.value()[2].response.ok());
  CHECK(outcomes.value()[1].source_index == 1);
  CHECK(!all_sources_failed(outcomes.value()));
}

TEST_CASE("all sources timing out is a total failure") {
  auto config = stub_workflow(2);
  SourceRunner runner = [](const SourceSpec&, const EntityMap&) -> Result<ApiResponse> {
    std::this_thread::sleep_for(300ms);
    return json_ok(json{{"late", true}});
  };
  DispatchOptions options;
  options.per_source_timeout = 30ms;
  auto outcomes = dispatch(config, {}, runner, options);
  REQUIRE(outcomes.ok());
  CHECK(all_sources_failed(outcomes.value()));
  for (const auto& outcome : outcomes.value()) {
    CHECK(outcome.response.error().code == Errc::Timeout);
  }
  std::this_thread::sleep_for(350ms);  // let abandoned workers finish
}

TEST_CASE("unbindable placeholders fail before any source runs") {
  WorkflowConfig config = stub_workflow(1);
  config.sources[0].op = "http_get";
  config.sources[0].url = "https://x.org/{gene}";
  bool ran = false;
  SourceRunner runner = [&](const SourceSpec&, const EntityMap&) -> Result<ApiResponse> {
    ran = true;
    return json_ok(json{});
  };
  auto outcomes = dispatch(config, {}, runner, {});
  REQUIRE(!outcomes.ok());
  CHECK(outcomes.error().code == Errc::InvalidArgument);
  CHECK(!ran);
}

// ---------------------------------------------------------------------------
// Response handling

TEST_CASE("bound json extraction needs no model call") {
  auto llm = mock_llm({});
  auto orchestrator = make_orchestrator(llm);
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  SourceSpec spec;
  spec.source = SourceId::NCBI_EUTILS;
  spec.route = ResponseRoute::Json;
  spec.bind = "$.result[*].chromosome";
  spec.target = "chromosome";

  auto response = json_ok(json{{"result", {{"uids", {"1"}}, {"1", {{"chromosome", "20"}}}}}});
  auto evidence = orchestrator.handle_response(spec, response, TaskKind::GeneLocation, 16384,
                                               transcript, gate);
  REQUIRE(evidence.ok());
  CHECK(evidence.value().candidate == "chr20");
  CHECK(evidence.value().confidence == Evidence::Confidence::Parsed);
  CHECK(llm->calls_made() == 0);
}

TEST_CASE("value_map rewrites extracted values") {
  auto orchestrator = make_orchestrator(mock_llm({}));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  SourceSpec spec;
  spec.route = ResponseRoute::Json;
  spec.bind = "$.genetype";
  spec.target = "protein-coding?";
  spec.value_map = {{"protein-coding", "TRUE"}, {"pseudo", "NA"}};

  auto evidence = orchestrator.handle_response(spec, json_ok(json{{"genetype", "protein-coding"}}),
                                               TaskKind::ProteinCodingGenes, 16384, transcript,
                                               gate);
  REQUIRE(evidence.ok());
  CHECK(evidence.value().raw_answer == "TRUE");
}

TEST_CASE("route and content kind must agree") {
  auto orchestrator = make_orchestrator(mock_llm({}));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  SourceSpec spec;
  spec.route = ResponseRoute::Json;
  spec.bind = "$.x";
  auto evidence = orchestrator.handle_response(spec, html_ok("<p>x</p>"), TaskKind::GeneAlias,
                                               16384, transcript, gate);
  REQUIRE(!evidence.ok());
  CHECK(evidence.error().code == Errc::PipelineMismatch);
}

TEST_CASE("small unbound json bodies take one direct model extraction") {
  auto llm = mock_llm({{.index = {}, .substring = std::string("Value wanted"), .response = "chr7"}});
  auto orchestrator = make_orchestrator(llm);
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  SourceSpec spec;
  spec.route = ResponseRoute::Json;
  spec.target = "chromosome";
  auto evidence = orchestrator.handle_response(spec, json_ok(json{{"c", "chr7"}}),
                                               TaskKind::GeneLocation, 16384, transcript, gate);
  REQUIRE(evidence.ok());
  CHECK(evidence.value().candidate == "chr7");
  CHECK(evidence.value().confidence == Evidence::Confidence::LlmExtracted);
  CHECK(llm->calls_made() == 1);
}

TEST_CASE("oversized json goes through a schema summary and a targeted path") {
  auto llm = mock_llm({
      {.index = {}, .substring = std::string("Schema summary"), .response = "$.payload.answer"},
  });
  auto orchestrator = make_orchestrator(llm);
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  json big;
  big["payload"]["answer"] = "chr9";
  std::string filler(200 * 1024, 'x');
  big["payload"]["filler"] = filler;

  SourceSpec spec;
  spec.route = ResponseRoute::Json;
  spec.target = "the answer";
  std::size_t threshold = 16384;
  auto evidence = orchestrator.handle_response(spec, json_ok(big), TaskKind::GeneLocation,
                                               threshold, transcript, gate);
  REQUIRE(evidence.ok());
  CHECK(evidence.value().candidate == "chr9");
  CHECK(llm->calls_made() == 1);

  bool summary_event = false;
  for (const auto& event : transcript.events) {
    if (event.kind == EventKind::Extraction && event.agent_id == "feature_extractor") {
      summary_event = true;
      CHECK(event.payload_bytes <= threshold / 4);
    }
  }
  CHECK(summary_event);
}

TEST_CASE("html pipeline writes an extractor once and reuses it via the cache") {
  auto cache = std::make_shared<ExtractionCache>();
  auto llm = mock_llm({
      {.index = {},
       .substring = std::string("extraction program"),
       .response = "SelectCss(\"td.chr\"), First, Text"},
  });
  auto orchestrator = make_orchestrator(llm, cache);
  Transcript first_transcript;
  Transcript second_transcript;
  BudgetGate gate = orchestrator.make_gate();

  SourceSpec spec;
  spec.source = SourceId::UCSC;
  spec.route = ResponseRoute::Html;
  spec.target = "chromosome cell";
  spec.op = "http_get";
  spec.url = "https://x.org/page";

  auto page = [](const std::string& value) {
    return html_ok("<table><tr><td class=\"chr\">" + value + "</td></tr></table>");
  };

  auto first = orchestrator.handle_response(spec, page("chr8"), TaskKind::GeneLocation, 16384,
                                            first_transcript, gate);
  REQUIRE(first.ok());
  CHECK(first.value().candidate == "chr8");
  CHECK(llm->calls_made() == 1);

  // Same structure, different text: served from the cache, zero model calls.
  auto second = orchestrator.handle_response(spec, page("chr15"), TaskKind::GeneLocation, 16384,
                                             second_transcript, gate);
  REQUIRE(second.ok());
  CHECK(second.value().candidate == "chr15");
  CHECK(llm->calls_made() == 1);

  std::size_t llm_events = 0;
  for (const auto& event : second_transcript.events) {
    if (event.kind == EventKind::LlmCall) ++llm_events;
  }
  CHECK(llm_events == 0);

  std::string key = ExtractionCache::make_key(
      spec.source, spec.endpoint_key(),
      structure_fingerprint(page("anything").body, ContentKind::Html));
  CHECK(cache->hit_count(key) == 1);
}

TEST_CASE("write_extractor retries once on invalid output") {
  auto retry_llm = mock_llm({
      {.index = std::size_t{0}, .substring = {}, .response = "this is prose, not a program"},
      {.index = std::size_t{1}, .substring = {}, .response = "SelectCss(\"p\"), Text"},
  });
  auto orchestrator = make_orchestrator(retry_llm);
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  auto program = orchestrator.write_extractor("<p>x</p>", "the value", transcript, gate);
  REQUIRE(program.ok());
  CHECK(program.value().instructions.size() == 2);
  CHECK(retry_llm->calls_made() == 2);
}

TEST_CASE("write_extractor gives up after two invalid replies") {
  auto prose_llm = mock_llm({
      {.index = std::size_t{0}, .substring = {}, .response = "prose"},
      {.index = std::size_t{1}, .substring = {}, .response = "more prose"},
  });
  auto orchestrator = make_orchestrator(prose_llm);
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();

  auto program = orchestrator.write_extractor("<p>x</p>", "the value", transcript, gate);
  REQUIRE(!program.ok());
  CHECK(program.error().code == Errc::ProgramInvalid);

  bool saw_marker = false;
  for (const auto& event : transcript.events) {
    if (event.error_code == "ProgramInvalid") saw_marker = true;
  }
  CHECK(saw_marker);
}

// ---------------------------------------------------------------------------
// Consensus

TEST_CASE("strict majority wins") {
  auto orchestrator = make_orchestrator(mock_llm({}));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();
  Question question{"q1", TaskKind::GeneLocation, "where is X?"};

  std::vector<Evidence> evidence = {
      {SourceId::NCBI_EUTILS, "chr8", "chr8", {"chr8"}, Evidence::Confidence::Parsed},
      {SourceId::HGNC, "chr8", "chr8", {"chr8"}, Evidence::Confidence::Parsed},
      {SourceId::UCSC, "chr7", "chr7", {"chr7"}, Evidence::Confidence::Parsed},
  };
  auto prediction = orchestrator.decide(question, evidence,
                                        ConsensusPolicy::MajorityThenPriority, transcript, gate);
  REQUIRE(prediction.ok());
  CHECK(prediction.value().normalized == "chr8");

  bool decision_event = false;
  for (const auto& event : transcript.events) {
    if (event.kind == EventKind::Decision) {
      decision_event = true;
      CHECK(event.payload.find("chr8=2") != std::string::npos);
    }
  }
  CHECK(decision_event);
}

TEST_CASE("ties fall back to source priority order") {
  auto orchestrator = make_orchestrator(mock_llm({}));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();
  Question question{"q2", TaskKind::GeneLocation, "where?"};

  std::vector<Evidence> evidence = {
      {SourceId::NCBI_EUTILS, "chr8", "chr8", {"chr8"}, Evidence::Confidence::Parsed},
      {SourceId::UCSC, "chr7", "chr7", {"chr7"}, Evidence::Confidence::Parsed},
  };
  auto prediction = orchestrator.decide(question, evidence,
                                        ConsensusPolicy::MajorityThenPriority, transcript, gate);
  REQUIRE(prediction.ok());
  CHECK(prediction.value().normalized == "chr8");  // first configured source
}

TEST_CASE("empty evidence is NoEvidence") {
  auto orchestrator = make_orchestrator(mock_llm({}));
  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();
  Question question{"q3", TaskKind::GeneLocation, "where?"};
  auto prediction = orchestrator.decide(question, {}, ConsensusPolicy::MajorityThenPriority,
                                        transcript, gate);
  REQUIRE(!prediction.ok());
  CHECK(prediction.error().code == Errc::NoEvidence);
}

// ---------------------------------------------------------------------------
// Budget

TEST_CASE("zero budget aborts before the first model call") {
  auto llm = mock_llm({{.index = {}, .substring = {}, .response = "anything"}});
  OrchestratorConfig config;
  config.llm = llm;
  config.pricing = Pricing{0.15, 0.60, "test"};
  config.budget_usd = 0.0;
  Orchestrator orchestrator(std::move(config));

  Transcript transcript;
  BudgetGate gate = orchestrator.make_gate();
  // A question that evades every rule forces the model fallback.
  auto detected = orchestrator.detect_task("Tell me about biology.", transcript, gate);
  REQUIRE(!detected.ok());
  CHECK(detected.error().code == Errc::BudgetExceeded);
  CHECK(llm->calls_made() == 0);
}

TEST_CASE("answer over replay fixtures is deterministic across fresh engines") {
  auto repo = std::filesystem::path(REPO_ROOT);
  auto run_once = [&] {
    auto script = MockScript::from_json_file(repo / "data" / "mock" / "demo_script.json");
    REQUIRE(script.ok());
    auto workflows = load_workflows(repo / "config" / "workflows");
    REQUIRE(workflows.ok());

    OrchestratorConfig config;
    config.llm = std::make_shared<MockLlm>(std::move(script.value()));
    config.transport =
        std::make_shared<FixtureStore>(repo / "fixtures", FixtureMode::Replay, nullptr);
    config.workflows = std::move(workflows.value());
    config.pricing = Pricing{0.15, 0.60, "test"};
    Orchestrator engine(std::move(config));

    auto [prediction, transcript] =
        engine.answer({"d1", TaskKind::GeneAlias, "What is the official gene symbol of LMP10?"});
    std::string trace = prediction.raw + "|" + prediction.normalized + "|" +
                        (transcript.outcome == Outcome::Answered ? "A|" : "F|");
    for (const auto& event : transcript.events) {
      trace += event.agent_id + ":" + event_kind_name(event.kind) + ":" + event.input_digest +
               ":" + event.output_digest + ";";
    }
    return trace;
  };

  std::string first = run_once();
  CHECK(first.rfind("PSMB10|psmb10|A|", 0) == 0);
  for (int i = 0; i < 2; ++i) CHECK(run_once() == first);
}

namespace {

class UrlStub : public HttpTransport {
 public:
  void add(const std::string& url, const json& body) {
    ApiResponse response;
    response.status = 200;
    response.content_kind = ContentKind::Json;
    response.body = body.dump();
    responses_[url] = std::move(response);
  }
  Result<ApiResponse> send(const ApiRequest& request) override {
    auto it = responses_.find(request.url);
    if (it == responses_.end()) return make_error(Errc::HttpError, "no stub: " + request.url);
    return it->second;
  }

 private:
  std::map<std::string, ApiResponse> responses_;
};

}  // namespace

TEST_CASE("a question whose sources all come back empty fails and classifies E1") {
  SourceSpec spec;
  spec.source = SourceId::NCBI_EUTILS;
  spec.op = "eutils_search_summary";
  spec.params = {{"db", "gene"}, {"term", "{gene}[sym]"}};
  spec.route = ResponseRoute::Json;
  spec.target = "chromosome";
  spec.bind = "$.result[*].chromosome";

  WorkflowConfig workflow;
  workflow.task = TaskKind::GeneLocation;
  workflow.sources = {spec};

  auto stub = std::make_shared<UrlStub>();
  EutilsClient urls(nullptr);
  stub->add(urls.search_request("gene", "NOSUCH[sym]").url,
            json{{"esearchresult", {{"idlist", json::array()}}}});

  OrchestratorConfig config;
  config.llm = mock_llm({});
  config.transport = stub;
  config.workflows = {{TaskKind::GeneLocation, workflow}};
  config.pricing = Pricing{0.15, 0.60, "test"};
  Orchestrator engine(std::move(config));

  auto [prediction, transcript] = engine.answer(
      {"e1case", TaskKind::GeneLocation,
       "Which chromosome is gene NOSUCH located on in the human genome?"});

  CHECK(transcript.outcome == Outcome::Failed);
  CHECK(transcript.fail_reason == FailReason::NoEvidence);

  bool saw_empty_api = false;
  for (const auto& event : transcript.events) {
    if (event.kind == EventKind::ApiCall && event.ok && event.empty_result) saw_empty_api = true;
  }
  CHECK(saw_empty_api);

  GoldAnswer gold;
  gold.value = GoldAnswer::ExactText{"chr1"};
  CHECK(classify_error(transcript, 0.0, gold) == ErrorClass::E1);
}

TEST_CASE("budget gate spends monotonically") {
  BudgetGate gate(1.0, Pricing{1000.0, 1000.0, "expensive"});
  CHECK(gate.authorize().ok());
  gate.charge(TokenUsage{100, 100});
  std::int64_t first = gate.spent_microusd();
  CHECK(first > 0);
  gate.charge(TokenUsage{100, 100});
  CHECK(gate.spent_microusd() > first);
}
