// SPDX-License-Identifier: Apache-2.0
#include <chrono>

#include <httplib.h>

#include "genomagent/db/transport.hpp"

namespace genomagent {

namespace {

class LiveHttpTransport : public HttpTransport {
 public:
  explicit LiveHttpTransport(LiveTransportConfig config)
      : config_(config), ncbi_limiter_(config.ncbi_min_interval) {}

  Result<ApiResponse> send(const ApiRequest& request) override {
    auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) {
      return make_error(Errc::InvalidArgument, "URL not absolute: " + request.url);
    }
    auto rest = request.url.substr(scheme_end + 3);
    auto path_start = rest.find('/');
    std::string host = rest.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : rest.substr(path_start);
    std::string origin = request.url.substr(0, scheme_end + 3) + host;

    if (host.find("ncbi.nlm.nih.gov") != std::string::npos) {
      ncbi_limiter_.acquire();
    }

    httplib::Client client(origin);
    client.set_connection_timeout(static_cast<time_t>(config_.timeout.count()), 0);
    client.set_read_timeout(static_cast<time_t>(config_.timeout.count()), 0);
    client.set_follow_location(true);

    httplib::Headers headers = {{"Accept", "application/json, text/html;q=0.9, */*;q=0.8"}};

    auto started = std::chrono::steady_clock::now();
    httplib::Result res = request.method == HttpMethod::Get
                              ? client.Get(path, headers)
                              : client.Post(path, headers, request.body,
                                            "application/x-www-form-urlencoded");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (!res) {
      return make_error(Errc::HttpError, "transport failure for " + request.url + ": " +
                                             httplib::to_string(res.error()));
    }

    ApiResponse response;
    response.status = res->status;
    response.body = res->body;
    response.content_kind = infer_content_kind(res->get_header_value("Content-Type"), res->body);
    response.latency_ms = static_cast<std::uint64_t>(elapsed.count());
    return response;
  }

 private:
  LiveTransportConfig config_;
  RateLimiter ncbi_limiter_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_live_transport(const LiveTransportConfig& config) {
  return std::make_shared<LiveHttpTransport>(config);
}

}  // namespace genomagent
