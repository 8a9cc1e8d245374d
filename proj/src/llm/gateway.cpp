// SPDX-License-Identifier: Apache-2.0
#include "genomagent/llm/gateway.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "genomagent/core/digest.hpp"

namespace genomagent {

using nlohmann::json;

const char* finish_reason_name(FinishReason reason) {
  switch (reason) {
    case FinishReason::Stop: return "stop";
    case FinishReason::StopSequence: return "stop_sequence";
    case FinishReason::Length: return "length";
  }
  return "stop";
}

std::optional<FinishReason> finish_reason_from_name(const std::string& name) {
  if (name == "stop") return FinishReason::Stop;
  if (name == "stop_sequence") return FinishReason::StopSequence;
  if (name == "length") return FinishReason::Length;
  return std::nullopt;
}

Result<void> validate_request(const CompletionRequest& request) {
  if (request.max_tokens < 1) {
    return make_error(Errc::InvalidArgument, "max_tokens must be >= 1");
  }
  if (request.temperature < 0.0 || request.temperature > 2.0) {
    return make_error(Errc::InvalidArgument, "temperature must be in [0, 2]");
  }
  for (const auto& stop : request.stop_sequences) {
    if (stop.empty()) {
      return make_error(Errc::InvalidArgument, "stop sequences must be nonempty");
    }
  }
  return {};
}

CompletionResult apply_stop_sequences(std::string text,
                                      const std::vector<std::string>& stops) {
  CompletionResult result;
  std::size_t cut = std::string::npos;
  for (const auto& stop : stops) {
    auto pos = text.find(stop);
    if (pos != std::string::npos && pos < cut) {
      cut = pos;
      result.matched_stop = stop;
    }
  }
  if (cut != std::string::npos) {
    text.resize(cut);
    result.finish = FinishReason::StopSequence;
  } else {
    result.finish = FinishReason::Stop;
    result.matched_stop.clear();
  }
  result.text = std::move(text);
  return result;
}

namespace {

std::uint64_t estimate_tokens(std::string_view text) {
  return (text.size() + 3) / 4;  // ceil(chars / 4)
}

}  // namespace

std::int64_t cost_microusd(const TokenUsage& usage, const Pricing& pricing) {
  // One token costs rate/1e6 USD, i.e. exactly `rate` micro-USD per million
  // tokens; nearbyint under the default rounding mode is ties-to-even.
  double micros = static_cast<double>(usage.prompt_tokens) *
                      pricing.usd_per_million_prompt_tokens +
                  static_cast<double>(usage.completion_tokens) *
                      pricing.usd_per_million_completion_tokens;
  return static_cast<std::int64_t>(std::nearbyint(micros));
}

double cost_usd(const TokenUsage& usage, const Pricing& pricing) {
  return static_cast<double>(cost_microusd(usage, pricing)) / 1e6;
}

Result<Pricing> load_pricing(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::IoError, "cannot open pricing file: " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "pricing file is not a JSON object");
  }
  Pricing pricing;
  pricing.usd_per_million_prompt_tokens = doc.value("usd_per_million_prompt_tokens", 0.0);
  pricing.usd_per_million_completion_tokens = doc.value("usd_per_million_completion_tokens", 0.0);
  pricing.model_label = doc.value("model_label", "unknown");
  if (pricing.usd_per_million_prompt_tokens < 0 ||
      pricing.usd_per_million_completion_tokens < 0 ||
      !std::isfinite(pricing.usd_per_million_prompt_tokens) ||
      !std::isfinite(pricing.usd_per_million_completion_tokens)) {
    return make_error(Errc::InvalidArgument, "pricing rates must be finite and >= 0");
  }
  return pricing;
}

// ---------------------------------------------------------------------------
// MockLlm

Result<MockScript> MockScript::from_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return make_error(Errc::IoError, "cannot open mock script: " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    return make_error(Errc::MalformedResponse, "mock script must be a JSON array");
  }
  MockScript script;
  for (const auto& item : doc) {
    MockEntry entry;
    if (item.contains("index")) entry.index = item["index"].get<std::size_t>();
    if (item.contains("substring")) entry.substring = item["substring"].get<std::string>();
    entry.response = item.value("response", "");
    script.entries.push_back(std::move(entry));
  }
  return script;
}

Result<CompletionResult> MockLlm::complete(const CompletionRequest& request) {
  if (auto check = validate_request(request); !check.ok()) return check.error();

  std::lock_guard<std::mutex> lock(mutex_);
  std::size_t call_index = calls_++;
  std::string prompt = request.system_prompt + "\n" + request.user_prompt;

  for (std::size_t i = 0; i < script_.entries.size(); ++i) {
    const MockEntry& entry = script_.entries[i];
    bool matches = false;
    if (entry.index) {
      matches = *entry.index == call_index;
    } else if (entry.substring) {
      matches = prompt.find(*entry.substring) != std::string::npos;
    } else {
      matches = !consumed_[i];
    }
    if (!matches) continue;
    if (!entry.index && !entry.substring) consumed_[i] = true;

    CompletionResult result = apply_stop_sequences(entry.response, request.stop_sequences);
    result.usage.prompt_tokens =
        estimate_tokens(request.system_prompt) + estimate_tokens(request.user_prompt);
    result.usage.completion_tokens = estimate_tokens(result.text);
    return result;
  }
  return make_error(Errc::ScriptExhausted,
                    "no mock entry matches call " + std::to_string(call_index));
}

std::size_t MockLlm::calls_made() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

Result<CompletionResult> CountingLlm::complete(const CompletionRequest& request) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
  }
  return inner_->complete(request);
}

std::size_t CountingLlm::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

// ---------------------------------------------------------------------------
// CassetteLlm

CassetteLlm::CassetteLlm(std::filesystem::path dir) : dir_(std::move(dir)) {}

CassetteLlm::CassetteLlm(std::filesystem::path dir, std::shared_ptr<LlmBackend> inner)
    : dir_(std::move(dir)), inner_(std::move(inner)) {}

std::string CassetteLlm::request_digest(const CompletionRequest& request) {
  json key = {
      {"system", request.system_prompt},
      {"user", request.user_prompt},
      {"stops", request.stop_sequences},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
  };
  return content_digest(key.dump());
}

Result<CompletionResult> CassetteLlm::complete(const CompletionRequest& request) {
  if (auto check = validate_request(request); !check.ok()) return check.error();

  auto path = dir_ / (request_digest(request) + ".json");

  if (!inner_) {
    std::ifstream in(path);
    if (!in) {
      return make_error(Errc::CassetteMiss, "no recorded completion at " + path.string());
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      return make_error(Errc::MalformedResponse, "corrupt cassette: " + path.string());
    }
    CompletionResult result;
    result.text = doc.value("text", "");
    result.matched_stop = doc.value("matched_stop", "");
    auto finish = finish_reason_from_name(doc.value("finish", "stop"));
    result.finish = finish.value_or(FinishReason::Stop);
    result.usage.prompt_tokens = doc.value("/usage/prompt_tokens"_json_pointer, 0ULL);
    result.usage.completion_tokens = doc.value("/usage/completion_tokens"_json_pointer, 0ULL);
    return result;
  }

  auto result = inner_->complete(request);
  if (!result.ok()) return result;

  json doc = {
      {"request",
       {{"system", request.system_prompt},
        {"user", request.user_prompt},
        {"stops", request.stop_sequences},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature}}},
      {"text", result.value().text},
      {"finish", finish_reason_name(result.value().finish)},
      {"matched_stop", result.value().matched_stop},
      {"usage",
       {{"prompt_tokens", result.value().usage.prompt_tokens},
        {"completion_tokens", result.value().usage.completion_tokens}}},
  };

  std::lock_guard<std::mutex> lock(write_mutex_);
  std::filesystem::create_directories(dir_);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return make_error(Errc::IoError, "cannot write cassette: " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
  return result;
}

}  // namespace genomagent
