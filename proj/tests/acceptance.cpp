// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every check prints one PASS/FAIL line; the process
// exits nonzero when any check fails. All runs are hermetic — the network
// transport used here refuses every request.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "genomagent/agent/baseline.hpp"
#include "genomagent/agent/orchestrator.hpp"
#include "genomagent/core/text.hpp"
#include "genomagent/eval/runner.hpp"

using namespace genomagent;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

int failures = 0;
std::vector<std::string> notes;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("%s  criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

GoldAnswer gold_interval(const char* text) {
  GoldAnswer gold;
  gold.value = GoldAnswer::Interval{parse_interval(text).value()};
  return gold;
}

Prediction make_pred(const std::string& raw, TaskKind task) {
  Prediction p;
  p.raw = raw;
  p.normalized = normalize_answer(raw, task);
  return p;
}

const SpeciesVocabulary kVocab = SpeciesVocabulary::builtin();

double score_or_nan(TaskKind task, const std::string& raw, const GoldAnswer& gold) {
  auto result = score_answer(task, make_pred(raw, task), gold, kVocab);
  return result.ok() ? result.value() : std::nan("");
}

// ---------------------------------------------------------------------------

void criterion_1_alignment_partial_credit() {
  Timer timer;
  auto gold = gold_interval("chr8:708-882");
  bool ok = score_or_nan(TaskKind::DnaToHuman, "chr8:120-121", gold) == 0.5 &&
            score_or_nan(TaskKind::DnaToHuman, "chr8:708-882", gold) == 1.0 &&
            score_or_nan(TaskKind::DnaToHuman, "chr7:708-882", gold) == 0.0;
  ok = ok && timer.seconds() < 1.0;
  report(1, "alignment partial-credit oracle (0.5 / 1.0 / 0.0, exact)", ok);
}

void criterion_2_species_mapping() {
  GoldAnswer human;
  human.value = GoldAnswer::Species{"human"};
  GoldAnswer latin;
  latin.value = GoldAnswer::Species{"ailuropoda melanoleuca"};

  bool ok = score_or_nan(TaskKind::DnaToSpecies, "Homo sapiens", human) == 1.0 &&
            score_or_nan(TaskKind::DnaToSpecies, "Ailuropoda melanoleuca", latin) == 1.0 &&
            score_or_nan(TaskKind::DnaToSpecies, "Mus musculus", human) == 0.0;
  report(2, "species vocabulary mapping with lowercase fallback", ok);
}

void criterion_3_macro_average() {
  auto macro = macro_average({0.98, 0.98, 0.89, 0.85});
  bool ok = macro.ok() && std::abs(macro.value() - 0.925) < 1e-12 &&
            format_score(macro.value()) == "0.93";

  std::vector<TaskResult> items = {
      {"n", TaskKind::GeneAlias, 0.98, 430'000, ErrorClass::None, Outcome::Answered},
      {"g", TaskKind::GeneLocation, 0.98, 880'000, ErrorClass::None, Outcome::Answered},
      {"f", TaskKind::DiseaseAssociation, 0.89, 250'000, ErrorClass::None, Outcome::Answered},
      {"s", TaskKind::DnaToHuman, 0.85, 550'000, ErrorClass::None, Outcome::Answered},
  };
  auto built = aggregate_report(std::move(items), "check", "mock");
  ok = ok && built.ok() && built.value().total_cost_microusd == 2'110'000 &&
       format_usd(built.value().total_cost_microusd) == "2.11" &&
       format_score(built.value().macro_avg_categories) == "0.93";
  report(3, "macro average 0.925 -> \"0.93\"; category costs total \"2.11\"", ok);
}

void criterion_4_recall_oracle() {
  Timer timer;
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> size_dist(0, 8);
  std::uniform_int_distribution<int> symbol_dist(0, 11);

  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    std::set<std::string> gold;
    int gold_size = std::max(1, size_dist(rng));
    while (static_cast<int>(gold.size()) < gold_size) {
      gold.insert("SYM" + std::to_string(symbol_dist(rng)));
    }
    std::vector<std::string> predicted;
    int predicted_size = size_dist(rng);
    for (int i = 0; i < predicted_size; ++i) {
      predicted.push_back("SYM" + std::to_string(symbol_dist(rng)));
    }

    int matched = 0;  // brute force |gold ∩ predicted| / |gold|
    for (const auto& g : gold) {
      for (const auto& p : predicted) {
        if (p == g) {
          ++matched;
          break;
        }
      }
    }
    double expected = static_cast<double>(matched) / static_cast<double>(gold.size());
    ok = std::abs(recall_score(predicted, gold) - expected) <= 1e-12;
  }
  ok = ok && timer.seconds() < 5.0;
  report(4, "recall equals brute-force intersection on 1000 random set pairs", ok);
}

void criterion_5_interval_properties() {
  Timer timer;
  std::mt19937 rng(77);
  std::uniform_int_distribution<std::uint64_t> pos(1, 1'000'000);
  bool ok = true;

  for (int trial = 0; trial < 10'000 && ok; ++trial) {
    GenomicInterval a{"chr5", 0, 0}, b{"chr5", 0, 0};
    std::uint64_t p = pos(rng), q = pos(rng), r = pos(rng), s = pos(rng);
    a.start = std::min(p, q);
    a.end = std::max(p, q);
    b.start = std::min(r, s);
    b.end = std::max(r, s);
    if (trial % 3 == 0) b.chromosome = "chr6";

    double score = interval_score(a, b);
    ok = score >= 0.0 && score <= 1.0;
    if (!ok) break;
    if (a.chromosome != b.chromosome) {
      ok = score == 0.0;
    } else if (a == b) {
      ok = score == 1.0;
    } else if (a.end < b.start || b.end < a.start) {
      ok = score == 0.5;
    } else {
      ok = score > 0.5 && score < 1.0;
    }
  }

  // Strict monotonicity in overlap at fixed union: construct |A∪B| = u and
  // |A∩B| = o via A=[0, o+x-1], B=[x, u-1].
  std::uniform_int_distribution<std::uint64_t> union_dist(10, 5000);
  for (int trial = 0; trial < 2'000 && ok; ++trial) {
    std::uint64_t u = union_dist(rng);
    std::uint64_t o1 = 1 + rng() % (u - 2);
    std::uint64_t o2 = o1 + 1 + rng() % (u - o1 - 1);
    auto score_at = [&](std::uint64_t o) {
      std::uint64_t x = rng() % (u - o + 1);
      GenomicInterval a{"chr1", 0, o + x - 1};
      GenomicInterval b{"chr1", x, u - 1};
      return interval_score(a, b);
    };
    ok = score_at(o2) > score_at(o1);
  }
  ok = ok && timer.seconds() < 10.0;
  report(5, "interval score properties over 10k fuzz pairs + monotone overlap", ok);
}

// Transport stub that answers canned bodies and records call order.
class OrderedStub : public HttpTransport {
 public:
  explicit OrderedStub(std::map<std::string, std::string> bodies) : bodies_(std::move(bodies)) {}
  Result<ApiResponse> send(const ApiRequest& request) override {
    calls.push_back(request.url);
    auto it = bodies_.find(request.url);
    if (it == bodies_.end()) return make_error(Errc::HttpError, "no stub: " + request.url);
    ApiResponse response;
    response.status = 200;
    response.content_kind = infer_content_kind("", it->second);
    response.body = it->second;
    return response;
  }
  std::vector<std::string> calls;

 private:
  std::map<std::string, std::string> bodies_;
};

void criterion_6_baseline_determinism() {
  const std::string arrow = "\xE2\x86\x92";
  const std::string url_a =
      "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi?db=gene&term=DEMO";
  const std::string url_b =
      "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esummary.fcgi?db=gene&id=42";

  auto run_once = [&](std::vector<std::string>* calls_out) {
    MockScript script;
    script.entries.push_back({.index = {}, .substring = {}, .response = "[" + url_a + "]" + arrow});
    script.entries.push_back({.index = {}, .substring = {}, .response = "[" + url_b + "]" + arrow});
    script.entries.push_back({.index = {}, .substring = {}, .response = "Answer: chr8\n\n"});
    auto llm = std::make_shared<MockLlm>(std::move(script));
    auto http = std::make_shared<OrderedStub>(std::map<std::string, std::string>{
        {url_a, R"({"esearchresult":{"idlist":["42"]}})"},
        {url_b, R"({"result":{"42":{"chromosome":"8"}}})"},
    });
    BaselineConfig config;
    config.llm = llm;
    config.http = http;
    config.prompt_dir = std::filesystem::path(REPO_ROOT) / "prompts" / "baseline";
    BaselineAgent agent(std::move(config));
    auto [prediction, transcript] = agent.answer(
        {"acc6", TaskKind::GeneLocation, "Which chromosome is gene DEMO located on?"});
    if (calls_out != nullptr) *calls_out = http->calls;

    std::string trace = prediction.raw + "|";
    for (const auto& event : transcript.events) {
      trace += event.agent_id + ":" + event_kind_name(event.kind) + ":" + event.input_digest +
               ":" + event.output_digest + ";";
    }
    return trace;
  };

  std::vector<std::string> calls;
  std::string first = run_once(&calls);
  bool ok = calls == std::vector<std::string>{url_a, url_b} &&
            first.rfind("chr8|", 0) == 0;
  for (int i = 0; i < 4 && ok; ++i) ok = run_once(nullptr) == first;

  // Malformed-URL script: NoApiCall termination classified E2.
  MockScript bad;
  bad.entries.push_back(
      {.index = {}, .substring = {}, .response = "see [not a url] " + arrow + " rest"});
  auto llm = std::make_shared<MockLlm>(std::move(bad));
  auto http = std::make_shared<OrderedStub>(std::map<std::string, std::string>{});
  BaselineConfig config;
  config.llm = llm;
  config.http = http;
  config.prompt_dir = std::filesystem::path(REPO_ROOT) / "prompts" / "baseline";
  BaselineAgent agent(std::move(config));
  auto [prediction, transcript] = agent.answer({"acc6b", TaskKind::GeneAlias, "symbol of Q?"});
  GoldAnswer gold;
  gold.value = GoldAnswer::ExactText{"PSMB10"};
  ok = ok && transcript.outcome == Outcome::Failed &&
       transcript.termination == LoopTermination::NoApiCall &&
       classify_error(transcript, 0.0, gold) == ErrorClass::E2 && http->calls.empty();

  report(6, "baseline loop: 2 ordered calls, byte-identical over 5 runs; NoApiCall -> E2", ok);
}

void criterion_7_error_taxonomy() {
  GoldAnswer gold;
  gold.value = GoldAnswer::ExactText{"chr8"};

  auto api_event = [](bool ok_flag, bool empty, std::string payload = "") {
    TranscriptEvent event;
    event.kind = EventKind::ApiCall;
    event.agent_id = "dispatcher";
    event.ok = ok_flag;
    event.empty_result = empty;
    event.payload_bytes = payload.size();
    event.payload = std::move(payload);
    return event;
  };

  Transcript e1;
  e1.add_event(api_event(true, true));
  e1.add_event(api_event(true, true));
  e1.add_event(api_event(true, true));

  Transcript e2;
  e2.termination = LoopTermination::NoApiCall;

  Transcript e3;
  std::string oversized(300 * 1024, 'z');
  oversized += " contains chr8 somewhere ";
  e3.add_event(api_event(true, false, oversized));

  Transcript perfect;
  perfect.add_event(api_event(true, false, "fine"));

  bool ok = classify_error(e1, 0.0, gold) == ErrorClass::E1 &&
            classify_error(e2, 0.0, gold) == ErrorClass::E2 &&
            classify_error(e3, 0.0, gold) == ErrorClass::E3 &&
            classify_error(perfect, 1.0, gold) == ErrorClass::None;
  report(7, "error taxonomy: crafted transcripts classify E1/E2/E3/None", ok);
}

void criterion_8_dispatch_parallelism() {
  WorkflowConfig config;
  config.task = TaskKind::GeneLocation;
  for (int i = 0; i < 3; ++i) {
    SourceSpec spec;
    spec.op = "stub";
    config.sources.push_back(spec);
  }
  SourceRunner runner = [](const SourceSpec&, const EntityMap&) -> Result<ApiResponse> {
    std::this_thread::sleep_for(100ms);
    ApiResponse response;
    response.status = 200;
    response.content_kind = ContentKind::Json;
    response.body = "{}";
    return response;
  };

  DispatchOptions wide;
  wide.parallelism = 3;
  Timer parallel_timer;
  auto parallel = dispatch(config, {}, runner, wide);
  double parallel_ms = parallel_timer.seconds() * 1000.0;

  DispatchOptions narrow;
  narrow.parallelism = 1;
  Timer serial_timer;
  auto serial = dispatch(config, {}, runner, narrow);
  double serial_ms = serial_timer.seconds() * 1000.0;

  bool ok = parallel.ok() && serial.ok() && parallel.value().size() == 3 &&
            parallel_ms < 250.0 && serial_ms >= 300.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "parallel %.0f ms, serial %.0f ms", parallel_ms,
                serial_ms);
  report(8, "dispatch fan-out: 3x100 ms in <250 ms parallel, >=300 ms serial", ok, detail);
}

void criterion_9_extraction_cache() {
  MockScript script;
  script.entries.push_back({.index = {},
                            .substring = std::string("extraction program"),
                            .response = "SelectCss(\"td.answer\"), First, Text"});
  auto counting = std::make_shared<CountingLlm>(std::make_shared<MockLlm>(std::move(script)));

  OrchestratorConfig config;
  config.llm = counting;
  config.pricing = Pricing{0.15, 0.60, "acc"};
  config.budget_usd = 0.05;
  Orchestrator orchestrator(std::move(config));

  SourceSpec spec;
  spec.source = SourceId::HGNC;
  spec.route = ResponseRoute::Html;
  spec.op = "http_get";
  spec.url = "https://x.org/page";
  spec.target = "the answer cell";

  auto page = [](const char* value) {
    ApiResponse response;
    response.status = 200;
    response.content_kind = ContentKind::Html;
    response.body = std::string("<html><body><table><tr><td class=\"answer\">") + value +
                    "</td></tr></table></body></html>";
    return response;
  };

  Transcript first, second;
  BudgetGate gate = orchestrator.make_gate();
  auto one = orchestrator.handle_response(spec, page("PSMB10"), TaskKind::GeneAlias, 16384,
                                          first, gate);
  auto two = orchestrator.handle_response(spec, page("TOTALLY DIFFERENT"), TaskKind::GeneAlias,
                                          16384, second, gate);

  std::size_t second_llm_events = 0;
  for (const auto& event : second.events) {
    if (event.kind == EventKind::LlmCall) ++second_llm_events;
  }
  bool ok = one.ok() && two.ok() && counting->calls() == 1 && second_llm_events == 0 &&
            one.value().candidate == "psmb10";
  report(9, "HTML extractor written once; cache serves the second response", ok);
}

void criterion_10_hermetic_benchmark() {
  Timer timer;
  auto repo = std::filesystem::path(REPO_ROOT);
  auto benchmark = load_benchmark(repo / "data" / "geneturing");
  if (!benchmark.ok()) {
    report(10, "hermetic 9-item benchmark", false, benchmark.error().message);
    return;
  }

  auto denying = std::make_shared<DenyingTransport>();
  std::string first_bytes;
  bool ok = benchmark.value().item_count() == 9;
  std::string detail;

  for (int run = 0; run < 3 && ok; ++run) {
    auto script = MockScript::from_json_file(repo / "data" / "mock" / "demo_script.json");
    if (!script.ok()) {
      ok = false;
      detail = script.error().message;
      break;
    }
    auto workflows = load_workflows(repo / "config" / "workflows");
    if (!workflows.ok()) {
      ok = false;
      detail = workflows.error().message;
      break;
    }

    OrchestratorConfig config;
    config.llm = std::make_shared<MockLlm>(std::move(script.value()));
    config.transport =
        std::make_shared<FixtureStore>(repo / "fixtures", FixtureMode::Replay, denying);
    config.workflows = std::move(workflows.value());
    config.pricing = Pricing{0.15, 0.60, "gpt-4o-mini"};
    config.budget_usd = 0.05;
    Orchestrator engine(std::move(config));

    RunnerOptions options;
    options.model_label = "gpt-4o-mini";
    options.backend_mode = "mock";
    auto report_result = run_benchmark(benchmark.value(), engine, engine.config().pricing,
                                       options);
    if (!report_result.ok()) {
      ok = false;
      detail = report_result.error().message;
      break;
    }
    const ScoreReport& score_report = report_result.value();
    for (const TaskResult& item : score_report.items) {
      if (item.outcome != Outcome::Answered || item.score != 1.0) {
        ok = false;
        detail = item.question_id + " score " + std::to_string(item.score);
      }
    }
    std::string bytes = emit_table(score_report) + emit_csv(score_report) +
                        emit_json(score_report).dump(2) + emit_scatter_csv({score_report});
    if (run == 0) {
      first_bytes = bytes;
    } else if (bytes != first_bytes) {
      ok = false;
      detail = "report bytes differ between runs";
    }
  }

  ok = ok && denying->attempts() == 0 && timer.seconds() < 30.0;
  if (denying->attempts() != 0) detail = "network transport was touched";
  report(10, "hermetic 9-item benchmark: all 1.0, zero network, identical bytes x3", ok, detail);
}

void criterion_11_cost_accounting() {
  Pricing pricing{0.15, 0.60, "acc"};
  bool ok = cost_usd(TokenUsage{1'000'000, 500'000}, pricing) == 0.45;

  std::mt19937 rng(4242);
  std::vector<TaskResult> items;
  std::int64_t manual_sum = 0;
  for (int i = 0; i < 10'000; ++i) {
    TaskResult item;
    item.question_id = "c" + std::to_string(i);
    item.task = kAllTasks[static_cast<std::size_t>(rng()) % kAllTasks.size()];
    item.score = 1.0;
    TokenUsage usage{rng() % 100'000, rng() % 100'000};
    item.cost_microusd = cost_microusd(usage, pricing);
    manual_sum += item.cost_microusd;
    items.push_back(std::move(item));
  }
  auto built = aggregate_report(std::move(items), "acc", "mock");
  ok = ok && built.ok() && built.value().total_cost_microusd == manual_sum;

  std::int64_t recomputed = 0;
  if (built.ok()) {
    for (const TaskResult& item : built.value().items) recomputed += item.cost_microusd;
    ok = ok && recomputed == built.value().total_cost_microusd;
  }
  report(11, "cost: $0.45 exact; 10k-item total equals per-item sum with zero drift", ok);
}

void criterion_12_budget_enforcement() {
  auto counting = std::make_shared<CountingLlm>(std::make_shared<MockLlm>(MockScript{}));
  OrchestratorConfig config;
  config.llm = counting;
  config.pricing = Pricing{0.15, 0.60, "acc"};
  config.budget_usd = 0.0;
  Orchestrator engine(std::move(config));

  // No rule matches, so answering requires a model call — which the zero
  // budget must refuse before it reaches the backend.
  QaOutcome outcome = engine.answer({"acc12", TaskKind::GeneAlias,
                                     "Please explain interesting facts about biology."});
  bool ok = outcome.transcript.outcome == Outcome::Failed &&
            outcome.transcript.fail_reason == FailReason::BudgetExceeded &&
            counting->calls() == 0 && outcome.transcript.cost_microusd == 0;
  report(12, "zero budget fails as BudgetExceeded with no model call charged", ok);
}

}  // namespace

int main() {
  std::printf("acceptance suite (hermetic: no network, mock model backends)\n");
  criterion_1_alignment_partial_credit();
  criterion_2_species_mapping();
  criterion_3_macro_average();
  criterion_4_recall_oracle();
  criterion_5_interval_properties();
  criterion_6_baseline_determinism();
  criterion_7_error_taxonomy();
  criterion_8_dispatch_parallelism();
  criterion_9_extraction_cache();
  criterion_10_hermetic_benchmark();
  criterion_11_cost_accounting();
  criterion_12_budget_enforcement();

  if (failures == 0) {
    std::printf("all 12 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", failures);
  return 1;
}
