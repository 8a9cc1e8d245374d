// SPDX-License-Identifier: Apache-2.0
#include "genomagent/agent/baseline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "genomagent/core/digest.hpp"
#include "genomagent/core/text.hpp"

namespace genomagent {

namespace {

Result<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::IoError, "missing prompt asset: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_examples(const std::string& text) {
  std::vector<std::string> examples;
  std::string current;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (trim(line) == "---") {
      if (!trim(current).empty()) examples.push_back(trim(current) + "\n");
      current.clear();
    } else {
      current += line;
      current.push_back('\n');
    }
  }
  if (!trim(current).empty()) examples.push_back(trim(current) + "\n");
  return examples;
}

std::uint64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count());
}

// The trailing text after the last call arrow; an "Answer:" label is shed.
std::string parse_final_answer(const std::string& text) {
  std::string tail = text;
  auto arrow = tail.rfind(kCallArrow);
  if (arrow != std::string::npos) {
    tail = tail.substr(arrow + std::char_traits<char>::length(kCallArrow));
  }
  tail = trim(tail);
  for (const char* label : {"Answer:", "answer:", "ANSWER:"}) {
    if (tail.rfind(label, 0) == 0) {
      tail = trim(tail.substr(std::char_traits<char>::length(label)));
      break;
    }
  }
  return tail;
}

}  // namespace

std::string PromptAssembly::render() const {
  std::string out = task_instructions;
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  out.push_back('\n');
  out += api_documentation;
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  out.push_back('\n');
  for (const std::string& example : examples) {
    out += example;
    out.push_back('\n');
  }
  out += "Question: " + question + "\n";
  return out;
}

Result<PromptAssembly> PromptAssembly::load(const std::filesystem::path& dir, Style style,
                                            std::string question) {
  PromptAssembly assembly;
  auto instructions = read_file(dir / "instructions.txt");
  if (!instructions.ok()) return instructions.error();
  assembly.task_instructions = trim(instructions.value()) + "\n";

  auto apidocs = read_file(dir / "apidocs.txt");
  if (!apidocs.ok()) return apidocs.error();
  assembly.api_documentation = trim(apidocs.value()) + "\n";

  auto examples_file =
      dir / (style == Style::Full ? "examples-full.txt" : "examples-slim.txt");
  auto examples = read_file(examples_file);
  if (!examples.ok()) return examples.error();
  assembly.examples = split_examples(examples.value());

  std::size_t expected = style == Style::Full ? 4 : 2;
  if (assembly.examples.size() != expected) {
    return make_error(Errc::InvalidArgument,
                      examples_file.string() + " must hold " + std::to_string(expected) +
                          " examples, found " + std::to_string(assembly.examples.size()));
  }
  assembly.question = std::move(question);
  return assembly;
}

std::optional<std::string> extract_api_call(std::string_view generated) {
  std::optional<std::string> best;
  std::size_t pos = 0;
  while (pos < generated.size()) {
    auto open = generated.find('[', pos);
    if (open == std::string_view::npos) break;
    auto close = generated.find(']', open + 1);
    if (close == std::string_view::npos) break;
    auto inner_open = generated.rfind('[', close - 1);  // innermost bracket pair
    std::string_view candidate = generated.substr(inner_open + 1, close - inner_open - 1);
    std::string url = trim(candidate);
    if (is_absolute_http_url(url)) best = url;
    pos = close + 1;
  }
  return best;
}

std::string truncate_context(std::string_view api_result, std::optional<std::size_t> limit) {
  if (!limit || api_result.size() <= *limit) return std::string(api_result);
  if (*limit == 0) return "\xE2\x80\xA6[truncated]";

  std::size_t cut = *limit;
  // Do not split a UTF-8 sequence: back up over continuation bytes.
  while (cut > 0 && (static_cast<unsigned char>(api_result[cut]) & 0xC0) == 0x80) --cut;
  return std::string(api_result.substr(0, cut)) + "\xE2\x80\xA6[truncated]";
}

SourceId BaselineAgent::source_for_url(const std::string& url) {
  if (url.find("blast") != std::string::npos) return SourceId::BLAST;
  if (url.find("genenames") != std::string::npos) return SourceId::HGNC;
  if (url.find("ucsc") != std::string::npos) return SourceId::UCSC;
  return SourceId::NCBI_EUTILS;
}

QaOutcome BaselineAgent::answer(const Question& question) {
  Transcript transcript;
  transcript.question_id = question.id;

  Prediction prediction;
  prediction.transcript_ref = question.id;

  auto assembly = PromptAssembly::load(config_.prompt_dir, config_.style, question.text);
  if (!assembly.ok()) {
    transcript.outcome = Outcome::Failed;
    transcript.fail_reason = FailReason::EngineError;
    return {prediction, transcript};
  }

  std::string prompt = assembly.value().render();

  for (int iteration = 0; iteration < config_.max_iterations; ++iteration) {
    CompletionRequest request;
    request.user_prompt = prompt;
    request.stop_sequences = {kCallArrow, kTerminator};
    request.max_tokens = config_.max_tokens;

    TranscriptEvent llm_event;
    llm_event.agent_id = "single_agent";
    llm_event.kind = EventKind::LlmCall;
    llm_event.input_digest = content_digest(prompt);

    auto started = std::chrono::steady_clock::now();
    auto completion = config_.llm->complete(request);
    llm_event.wall_time_ms = elapsed_ms(started);

    if (!completion.ok()) {
      llm_event.ok = false;
      llm_event.error_code = errc_name(completion.error().code);
      transcript.add_event(std::move(llm_event));
      transcript.outcome = Outcome::Failed;
      transcript.fail_reason = FailReason::EngineError;
      return {prediction, transcript};
    }

    const CompletionResult& result = completion.value();
    llm_event.output_digest = content_digest(result.text);
    llm_event.usage = result.usage;
    transcript.add_event(std::move(llm_event));

    bool wants_api_call =
        result.finish == FinishReason::StopSequence && result.matched_stop == kCallArrow;

    if (!wants_api_call) {
      // Blank-line terminator (or natural end): the tail is the answer.
      prediction.raw = parse_final_answer(result.text);
      prediction.normalized = normalize_answer(prediction.raw, question.task);
      transcript.termination = LoopTermination::TerminationToken;
      transcript.outcome = Outcome::Answered;
      transcript.fail_reason = FailReason::None;
      return {prediction, transcript};
    }

    auto url = extract_api_call(result.text);
    if (!url) {
      // Stop-token fired with no usable call: the classic parsing failure.
      TranscriptEvent event;
      event.agent_id = "single_agent";
      event.kind = EventKind::Decision;
      event.ok = false;
      event.error_code = fail_reason_name(FailReason::NoApiCall);
      transcript.add_event(std::move(event));
      transcript.termination = LoopTermination::NoApiCall;
      transcript.outcome = Outcome::Failed;
      transcript.fail_reason = FailReason::NoApiCall;
      return {prediction, transcript};
    }

    ApiRequest api_request;
    api_request.source = source_for_url(*url);
    api_request.url = *url;

    TranscriptEvent api_event;
    api_event.agent_id = "single_agent";
    api_event.kind = EventKind::ApiCall;
    api_event.input_digest = content_digest(*url);

    auto api_started = std::chrono::steady_clock::now();
    auto response = config_.http->send(api_request);
    api_event.wall_time_ms = elapsed_ms(api_started);

    std::string result_text;
    if (response.ok()) {
      result_text = response.value().body;
      api_event.output_digest = content_digest(result_text);
      api_event.payload = result_text;
      api_event.payload_bytes = result_text.size();
      api_event.empty_result = trim(result_text).empty();
    } else {
      result_text = "ERROR: " + response.error().message;
      api_event.ok = false;
      api_event.error_code = errc_name(response.error().code);
    }
    transcript.add_event(std::move(api_event));

    // Echo the consumed arrow, then the bracketed result, then a fresh
    // arrow — the shape the demonstrations use between call and answer.
    prompt += result.text + kCallArrow + "[" +
              truncate_context(result_text, config_.truncate_limit) + "]" + kCallArrow;
  }

  transcript.termination = LoopTermination::MaxIterations;
  transcript.outcome = Outcome::Failed;
  transcript.fail_reason = FailReason::MaxIterations;
  return {prediction, transcript};
}

}  // namespace genomagent
