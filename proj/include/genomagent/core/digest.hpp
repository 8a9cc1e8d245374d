// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace genomagent {

std::uint64_t fnv1a64(std::string_view data);

/// 16-hex-char digest of arbitrary content; stable across runs and platforms.
std::string content_digest(std::string_view data);

/// Canonical form of an absolute URL: lowercased scheme and host, query
/// parameters sorted, volatile parameters (api keys, timestamps) dropped.
std::string canonical_url(std::string_view url);

bool is_absolute_http_url(std::string_view url);

std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view data);

/// True when the bytes are printable UTF-8-ish text safe to embed in JSON.
bool is_probably_text(std::string_view data);

}  // namespace genomagent
