// SPDX-License-Identifier: Apache-2.0
//
// Operator surface: ask one question, run the benchmark, record fixtures.
// Exit codes: 0 success, 1 answered-failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "genomagent/agent/baseline.hpp"
#include "genomagent/agent/orchestrator.hpp"
#include "genomagent/core/digest.hpp"
#include "genomagent/db/clients.hpp"
#include "genomagent/eval/runner.hpp"
#include "genomagent/llm/live.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace genomagent;

namespace {

struct RunConfig {
  std::string engine = "agent";    // agent | baseline
  std::string backend = "mock";    // live | mock | replay
  std::string fixtures = "replay"; // record | replay | passthrough
  std::string mock_script;
  std::string fixture_dir = "fixtures";
  std::string cassette_dir = "cassettes";
  std::string pricing_file = "config/pricing.json";
  std::string workflow_dir = "config/workflows";
  std::string prompt_dir = "prompts/baseline";
  std::string data_dir = "data/geneturing";
  std::string vocab_file;
  std::string cache_file;
  std::string out_dir = "out";
  double budget_usd = 0.05;
  int parallelism = 4;
  std::string model;  // overrides pricing model label for live calls
};

int fail_config(const std::string& message) {
  std::cerr << "config error: " << message << "\n";
  return 2;
}

Result<void> apply_config_file(const std::string& path, RunConfig* config) {
  std::ifstream in(path);
  if (!in) return make_error(Errc::IoError, "cannot open config file: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "config file is not a JSON object: " + path);
  }
  auto get = [&](const char* key, std::string* out) {
    if (doc.contains(key) && doc[key].is_string()) *out = doc[key].get<std::string>();
  };
  get("engine", &config->engine);
  get("backend", &config->backend);
  get("fixtures", &config->fixtures);
  get("mock_script", &config->mock_script);
  get("fixture_dir", &config->fixture_dir);
  get("cassette_dir", &config->cassette_dir);
  get("pricing_file", &config->pricing_file);
  get("workflow_dir", &config->workflow_dir);
  get("prompt_dir", &config->prompt_dir);
  get("data_dir", &config->data_dir);
  get("vocab_file", &config->vocab_file);
  get("cache_file", &config->cache_file);
  get("out_dir", &config->out_dir);
  get("model", &config->model);
  if (doc.contains("budget_usd") && doc["budget_usd"].is_number()) {
    config->budget_usd = doc["budget_usd"].get<double>();
  }
  if (doc.contains("parallelism") && doc["parallelism"].is_number_integer()) {
    config->parallelism = doc["parallelism"].get<int>();
  }
  return {};
}

struct BuiltEngines {
  std::shared_ptr<LlmBackend> llm;
  std::shared_ptr<HttpTransport> transport;
  std::shared_ptr<ExtractionCache> cache;
  Pricing pricing;
  std::unique_ptr<QaEngine> engine;
};

Result<BuiltEngines> build(const RunConfig& config) {
  BuiltEngines built;

  auto pricing = load_pricing(config.pricing_file);
  if (!pricing.ok()) return pricing.error();
  built.pricing = pricing.value();
  if (!config.model.empty()) built.pricing.model_label = config.model;

  // Model backend.
  if (config.backend == "mock") {
    if (config.mock_script.empty()) {
      return make_error(Errc::InvalidArgument, "mock backend requires --mock-script");
    }
    auto script = MockScript::from_json_file(config.mock_script);
    if (!script.ok()) return script.error();
    built.llm = std::make_shared<MockLlm>(std::move(script.value()));
  } else if (config.backend == "replay") {
    if (!fs::is_directory(config.cassette_dir)) {
      return make_error(Errc::IoError,
                        "replay backend requires an existing cassette dir: " +
                            config.cassette_dir);
    }
    built.llm = std::make_shared<CassetteLlm>(config.cassette_dir);
  } else if (config.backend == "live") {
    LiveLlmConfig live;
    if (!built.pricing.model_label.empty()) live.model = built.pricing.model_label;
    auto inner = make_live_llm(live);
    if (config.fixtures == "record") {
      built.llm = std::make_shared<CassetteLlm>(config.cassette_dir, inner);
    } else {
      built.llm = inner;
    }
  } else {
    return make_error(Errc::InvalidArgument, "unknown backend: " + config.backend);
  }

  // HTTP side.
  if (config.fixtures == "replay") {
    built.transport =
        std::make_shared<FixtureStore>(config.fixture_dir, FixtureMode::Replay, nullptr);
  } else if (config.fixtures == "record") {
    built.transport = std::make_shared<FixtureStore>(config.fixture_dir, FixtureMode::Record,
                                                     make_live_transport({}));
  } else if (config.fixtures == "passthrough") {
    built.transport = make_live_transport({});
  } else {
    return make_error(Errc::InvalidArgument, "unknown fixtures mode: " + config.fixtures);
  }

  built.cache = std::make_shared<ExtractionCache>();
  if (!config.cache_file.empty() && fs::exists(config.cache_file)) {
    if (auto loaded = built.cache->load_file(config.cache_file); !loaded.ok()) {
      return loaded.error();
    }
  }

  if (config.engine == "agent") {
    auto workflows = load_workflows(config.workflow_dir);
    if (!workflows.ok()) return workflows.error();

    OrchestratorConfig orchestrator;
    orchestrator.llm = built.llm;
    orchestrator.transport = built.transport;
    orchestrator.workflows = std::move(workflows.value());
    orchestrator.cache = built.cache;
    orchestrator.pricing = built.pricing;
    orchestrator.budget_usd = config.budget_usd;
    orchestrator.parallelism = config.parallelism;
    if (config.fixtures != "replay") {
      orchestrator.blast_poll_interval = std::chrono::milliseconds(10000);
    }
    built.engine = std::make_unique<Orchestrator>(std::move(orchestrator));
  } else if (config.engine == "baseline") {
    BaselineConfig baseline;
    baseline.llm = built.llm;
    baseline.http = built.transport;
    baseline.prompt_dir = config.prompt_dir;
    built.engine = std::make_unique<BaselineAgent>(std::move(baseline));
  } else {
    return make_error(Errc::InvalidArgument, "unknown engine: " + config.engine);
  }
  return built;
}

json transcript_to_json(const Transcript& transcript) {
  json events = json::array();
  for (const TranscriptEvent& event : transcript.events) {
    json e = {
        {"agent_id", event.agent_id},
        {"kind", event_kind_name(event.kind)},
        {"input_digest", event.input_digest},
        {"output_digest", event.output_digest},
        {"usage",
         {{"prompt_tokens", event.usage.prompt_tokens},
          {"completion_tokens", event.usage.completion_tokens}}},
        {"wall_time_ms", event.wall_time_ms},
        {"ok", event.ok},
    };
    if (event.empty_result) e["empty_result"] = true;
    if (!event.error_code.empty()) e["error_code"] = event.error_code;
    if (event.payload_bytes > 0) e["payload_bytes"] = event.payload_bytes;
    events.push_back(std::move(e));
  }
  json doc = {
      {"question_id", transcript.question_id},
      {"events", events},
      {"total_usage",
       {{"prompt_tokens", transcript.total_usage.prompt_tokens},
        {"completion_tokens", transcript.total_usage.completion_tokens}}},
      {"outcome", transcript.outcome == Outcome::Answered ? "Answered" : "Failed"},
      {"cost_microusd", transcript.cost_microusd},
  };
  if (transcript.outcome == Outcome::Failed) {
    doc["fail_reason"] = fail_reason_name(transcript.fail_reason);
  }
  return doc;
}

Result<void> write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) return make_error(Errc::IoError, "cannot write " + path.string());
  out << content;
  return {};
}

int cmd_ask(const RunConfig& config, const std::string& question_text) {
  auto built = build(config);
  if (!built.ok()) return fail_config(built.error().message);

  Question question;
  question.id = "cli-" + content_digest(question_text).substr(0, 8);
  question.text = question_text;
  if (auto detected = rule_classify(question_text)) question.task = detected->task;

  QaOutcome outcome = built.value().engine->answer(question);
  std::int64_t cost = cost_microusd(outcome.transcript.total_usage, built.value().pricing);

  auto transcript_path = fs::path(config.out_dir) / (question.id + ".transcript.json");
  if (auto written = write_text(transcript_path, transcript_to_json(outcome.transcript).dump(2) + "\n");
      !written.ok()) {
    return fail_config(written.error().message);
  }

  if (!config.cache_file.empty()) {
    (void)built.value().cache->save_file(config.cache_file);
  }

  if (outcome.transcript.outcome == Outcome::Answered) {
    std::cout << outcome.prediction.raw << "\n";
    if (!outcome.prediction.normalized.empty() &&
        outcome.prediction.normalized != outcome.prediction.raw) {
      std::cout << "normalized: " << outcome.prediction.normalized << "\n";
    }
    std::cout << "cost_usd: " << format_usd_precise(cost) << "\n";
    std::cout << "transcript: " << transcript_path.string() << "\n";
    return 0;
  }
  std::cout << "FAILED: " << fail_reason_name(outcome.transcript.fail_reason) << "\n";
  std::cout << "cost_usd: " << format_usd_precise(cost) << "\n";
  std::cout << "transcript: " << transcript_path.string() << "\n";
  return 1;
}

int cmd_bench(const RunConfig& config) {
  auto built = build(config);
  if (!built.ok()) return fail_config(built.error().message);

  auto benchmark = load_benchmark(config.data_dir);
  if (!benchmark.ok()) return fail_config(benchmark.error().message);
  for (const std::string& warning : benchmark.value().warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  RunnerOptions options;
  options.model_label = built.value().pricing.model_label;
  options.backend_mode = config.backend;
  options.parallelism = config.parallelism;
  if (config.backend == "live") {
    char stamp[32];
    std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    options.generated_at = stamp;
  }
  if (!config.vocab_file.empty()) {
    if (auto loaded = options.vocabulary.load_file(config.vocab_file); !loaded.ok()) {
      return fail_config(loaded.error().message);
    }
  }

  auto report = run_benchmark(benchmark.value(), *built.value().engine,
                              built.value().pricing, options);
  if (!report.ok()) return fail_config(report.error().message);

  fs::path out_dir(config.out_dir);
  std::string table = emit_table(report.value());
  auto write_all = [&]() -> Result<void> {
    if (auto w = write_text(out_dir / "report.txt", table); !w.ok()) return w;
    if (auto w = write_text(out_dir / "report.csv", emit_csv(report.value())); !w.ok()) return w;
    if (auto w = write_text(out_dir / "report.json", emit_json(report.value()).dump(2) + "\n");
        !w.ok()) {
      return w;
    }
    return write_text(out_dir / "scatter.csv", emit_scatter_csv({report.value()}));
  };
  if (auto written = write_all(); !written.ok()) return fail_config(written.error().message);

  if (!config.cache_file.empty()) {
    (void)built.value().cache->save_file(config.cache_file);
  }

  std::cout << table;
  return 0;
}

int cmd_record(const RunConfig& config, const std::string& question_text) {
  RunConfig recording = config;
  recording.backend = "live";
  recording.fixtures = "record";

  auto built = build(recording);
  if (!built.ok()) return fail_config(built.error().message);

  std::vector<Question> questions;
  if (!question_text.empty()) {
    Question question;
    question.id = "rec-" + content_digest(question_text).substr(0, 8);
    question.text = question_text;
    questions.push_back(std::move(question));
  } else {
    auto benchmark = load_benchmark(recording.data_dir);
    if (!benchmark.ok()) return fail_config(benchmark.error().message);
    for (const auto& [task, items] : benchmark.value().tasks) {
      for (const BenchmarkItem& item : items) questions.push_back(item.question);
    }
  }

  int failures = 0;
  for (const Question& question : questions) {
    QaOutcome outcome = built.value().engine->answer(question);
    if (outcome.transcript.outcome == Outcome::Answered) {
      std::cout << question.id << ": recorded (" << outcome.prediction.raw << ")\n";
    } else {
      ++failures;
      std::cerr << question.id
                << ": FAILED: " << fail_reason_name(outcome.transcript.fail_reason) << "\n";
    }
  }
  std::cout << "recorded " << (questions.size() - static_cast<std::size_t>(failures)) << "/"
            << questions.size() << " items into " << recording.fixture_dir << " and "
            << recording.cassette_dir << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  // The config file is applied before flag parsing so flags override it.
  std::string config_file;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string_view(argv[i]) == "--config") config_file = argv[i + 1];
  }
  RunConfig config;
  if (!config_file.empty()) {
    if (auto applied = apply_config_file(config_file, &config); !applied.ok()) {
      return fail_config(applied.error().message);
    }
  }

  CLI::App app{"Multi-agent genomics question answering over NCBI/HGNC/UCSC"};
  app.require_subcommand(1);

  app.add_option("--config", config_file, "JSON config file; flags override it");
  app.add_option("--engine", config.engine, "agent | baseline");
  app.add_option("--backend", config.backend, "live | mock | replay");
  app.add_option("--fixtures", config.fixtures, "record | replay | passthrough");
  app.add_option("--mock-script", config.mock_script, "mock backend script (JSON)");
  app.add_option("--fixture-dir", config.fixture_dir, "API fixture directory");
  app.add_option("--cassette-dir", config.cassette_dir, "model cassette directory");
  app.add_option("--pricing", config.pricing_file, "pricing JSON file");
  app.add_option("--workflows", config.workflow_dir, "workflow config directory");
  app.add_option("--prompts", config.prompt_dir, "baseline prompt asset directory");
  app.add_option("--data", config.data_dir, "benchmark data directory");
  app.add_option("--vocab", config.vocab_file, "extra species vocabulary (JSON)");
  app.add_option("--cache", config.cache_file, "extractor cache persistence file");
  app.add_option("--budget", config.budget_usd, "per-question budget in USD");
  app.add_option("--parallelism", config.parallelism, "concurrent sources/questions");
  app.add_option("--out", config.out_dir, "output directory");

  std::string ask_text;
  auto* ask = app.add_subcommand("ask", "answer one question");
  ask->add_option("question", ask_text, "question text")->required();
  ask->fallthrough();

  auto* bench = app.add_subcommand("bench", "run the benchmark and emit reports");
  bench->fallthrough();

  std::string record_text;
  auto* record = app.add_subcommand("record", "record live fixtures/cassettes");
  record->add_option("question", record_text, "one question (default: whole benchmark)");
  record->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (ask->parsed()) return cmd_ask(config, ask_text);
  if (bench->parsed()) return cmd_bench(config);
  if (record->parsed()) return cmd_record(config, record_text);
  return 2;
}
