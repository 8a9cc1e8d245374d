// SPDX-License-Identifier: Apache-2.0
#include "genomagent/db/transport.hpp"

#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "genomagent/core/digest.hpp"

namespace genomagent {

using nlohmann::json;

Result<ApiResponse> DenyingTransport::send(const ApiRequest& request) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++attempts_;
  }
  return make_error(Errc::HttpError, "network disabled: " + request.url);
}

std::size_t DenyingTransport::attempts() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return attempts_;
}

void RateLimiter::acquire() {
  std::unique_lock<std::mutex> lock(mutex_);
  auto now = std::chrono::steady_clock::now();
  auto earliest = last_ + min_interval_;
  if (last_.time_since_epoch().count() != 0 && now < earliest) {
    lock.unlock();
    std::this_thread::sleep_until(earliest);
    lock.lock();
    now = std::chrono::steady_clock::now();
  }
  last_ = now;
}

// ---------------------------------------------------------------------------
// FixtureStore

FixtureStore::FixtureStore(std::filesystem::path dir, FixtureMode mode,
                           std::shared_ptr<HttpTransport> inner)
    : dir_(std::move(dir)), mode_(mode), inner_(std::move(inner)) {}

std::string FixtureStore::request_digest(const ApiRequest& request) {
  std::string key = (request.method == HttpMethod::Get ? "GET " : "POST ");
  key += canonical_url(request.url);
  key += "\n";
  key += content_digest(request.body);
  return content_digest(key);
}

std::filesystem::path FixtureStore::path_for(const ApiRequest& request) const {
  return dir_ / source_name(request.source) / (request_digest(request) + ".json");
}

Result<ApiResponse> FixtureStore::load(const ApiRequest& request) const {
  auto path = path_for(request);
  std::ifstream in(path);
  if (!in) {
    return make_error(Errc::FixtureMiss,
                      "no fixture for " + canonical_url(request.url) + " at " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedResponse, "corrupt fixture: " + path.string());
  }
  ApiResponse response;
  response.status = doc.value("status", 200);
  if (doc.contains("body_b64")) {
    response.body = base64_decode(doc["body_b64"].get<std::string>());
  } else {
    response.body = doc.value("body", "");
  }
  std::string kind = doc.value("content_kind", "TEXT");
  response.content_kind = ContentKind::Text;
  for (ContentKind k : {ContentKind::Json, ContentKind::Html, ContentKind::Xml, ContentKind::Text}) {
    if (kind == content_kind_name(k)) response.content_kind = k;
  }
  response.latency_ms = 0;
  return response;
}

Result<void> FixtureStore::store(const ApiRequest& request, const ApiResponse& response) {
  json doc = {
      {"source", source_name(request.source)},
      {"method", request.method == HttpMethod::Get ? "GET" : "POST"},
      {"url", canonical_url(request.url)},
      {"status", response.status},
      {"content_kind", content_kind_name(response.content_kind)},
  };
  if (!request.body.empty()) doc["request_body"] = request.body;
  if (is_probably_text(response.body)) {
    doc["body"] = response.body;
  } else {
    doc["body_b64"] = base64_encode(response.body);
  }

  std::lock_guard<std::mutex> lock(write_mutex_);
  auto path = path_for(request);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return make_error(Errc::IoError, "cannot write fixture: " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) return make_error(Errc::IoError, "cannot finalize fixture: " + path.string());
  return {};
}

Result<ApiResponse> FixtureStore::send(const ApiRequest& request) {
  switch (mode_) {
    case FixtureMode::Replay:
      return load(request);
    case FixtureMode::Passthrough:
      if (!inner_) return make_error(Errc::HttpError, "no inner transport");
      return inner_->send(request);
    case FixtureMode::Record: {
      if (!inner_) return make_error(Errc::HttpError, "no inner transport");
      auto response = inner_->send(request);
      if (!response.ok()) return response;
      if (auto stored = store(request, response.value()); !stored.ok()) {
        return stored.error();
      }
      return response;
    }
  }
  return make_error(Errc::HttpError, "invalid fixture mode");
}

}  // namespace genomagent
