// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual Result<ApiResponse> send(const ApiRequest& request) = 0;
};

/// Transport that refuses all traffic. Used to prove replay runs hermetic.
class DenyingTransport : public HttpTransport {
 public:
  Result<ApiResponse> send(const ApiRequest& request) override;
  std::size_t attempts() const;

 private:
  mutable std::mutex mutex_;
  std::size_t attempts_ = 0;
};

/// Minimum-interval limiter shared by all live NCBI requests.
class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds min_interval)
      : min_interval_(min_interval) {}

  void acquire();

 private:
  std::chrono::milliseconds min_interval_;
  std::chrono::steady_clock::time_point last_{};
  std::mutex mutex_;
};

struct LiveTransportConfig {
  std::chrono::seconds timeout{30};
  std::chrono::milliseconds ncbi_min_interval{334};  // <= 3 requests/second
};

std::shared_ptr<HttpTransport> make_live_transport(const LiveTransportConfig& config);

enum class FixtureMode { Record, Replay, Passthrough };

/// Transport wrapper persisting API traffic under
/// `{dir}/{source_id}/{digest}.json`. Record mode persists every inner
/// response before returning it; Replay mode serves exclusively from disk
/// and never touches the inner transport.
class FixtureStore : public HttpTransport {
 public:
  FixtureStore(std::filesystem::path dir, FixtureMode mode,
               std::shared_ptr<HttpTransport> inner);

  Result<ApiResponse> send(const ApiRequest& request) override;

  FixtureMode mode() const { return mode_; }

  /// Stable digest of method + canonical URL + body digest.
  static std::string request_digest(const ApiRequest& request);

  std::filesystem::path path_for(const ApiRequest& request) const;

  /// Writes a fixture directly; used by recording and fixture tooling.
  Result<void> store(const ApiRequest& request, const ApiResponse& response);

 private:
  Result<ApiResponse> load(const ApiRequest& request) const;

  std::filesystem::path dir_;
  FixtureMode mode_;
  std::shared_ptr<HttpTransport> inner_;
  std::mutex write_mutex_;
};

}  // namespace genomagent
