// SPDX-License-Identifier: Apache-2.0
#include "genomagent/core/digest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace genomagent {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string content_digest(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace {

// Parameters whose values change between otherwise-identical requests and
// must not affect fixture digests.
bool is_volatile_param(std::string_view key) {
  return key == "api_key" || key == "key" || key == "ts" ||
         key == "timestamp" || key == "email" || key == "tool";
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string canonical_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::string(url);

  std::string_view scheme = url.substr(0, scheme_end);
  std::string_view rest = url.substr(scheme_end + 3);

  auto path_start = rest.find_first_of("/?");
  std::string_view host = path_start == std::string_view::npos ? rest : rest.substr(0, path_start);
  std::string_view path_and_query = path_start == std::string_view::npos
                                        ? std::string_view("/")
                                        : rest.substr(path_start);
  if (path_and_query.front() == '?') {
    // Query with no path: canonicalize as the root path.
    return canonical_url(std::string(url.substr(0, scheme_end + 3)) + std::string(host) + "/" +
                         std::string(path_and_query));
  }

  auto query_start = path_and_query.find('?');
  std::string_view path = path_and_query.substr(0, query_start);
  std::string out = lower(scheme) + "://" + lower(host) + std::string(path);

  if (query_start == std::string_view::npos) return out;

  std::string_view query = path_and_query.substr(query_start + 1);
  auto fragment = query.find('#');
  if (fragment != std::string_view::npos) query = query.substr(0, fragment);

  std::vector<std::string> params;
  std::size_t pos = 0;
  while (pos <= query.size()) {
    auto amp = query.find('&', pos);
    std::string_view pair = query.substr(pos, amp == std::string_view::npos ? std::string_view::npos : amp - pos);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      std::string_view key = pair.substr(0, eq);
      if (!is_volatile_param(key)) params.emplace_back(pair);
    }
    if (amp == std::string_view::npos) break;
    pos = amp + 1;
  }
  std::sort(params.begin(), params.end());

  if (params.empty()) return out;
  out.push_back('?');
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out.push_back('&');
    out += params[i];
  }
  return out;
}

bool is_absolute_http_url(std::string_view url) {
  if (url.substr(0, 7) != "http://" && url.substr(0, 8) != "https://") return false;
  auto rest = url.substr(url.find("://") + 3);
  if (rest.empty() || rest[0] == '/' || rest[0] == '?') return false;
  for (char c : url) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  auto host = rest.substr(0, rest.find_first_of("/?"));
  return host.find('.') != std::string_view::npos || host.find("localhost") == 0;
}

static const char kB64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::string_view data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    std::uint32_t n = (static_cast<unsigned char>(data[i]) << 16) |
                      (static_cast<unsigned char>(data[i + 1]) << 8) |
                      static_cast<unsigned char>(data[i + 2]);
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
    out.push_back(kB64Chars[(n >> 6) & 63]);
    out.push_back(kB64Chars[n & 63]);
    i += 3;
  }
  std::size_t rem = data.size() - i;
  if (rem == 1) {
    std::uint32_t n = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
    out += "==";
  } else if (rem == 2) {
    std::uint32_t n = (static_cast<unsigned char>(data[i]) << 16) |
                      (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
    out.push_back(kB64Chars[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string base64_decode(std::string_view data) {
  std::array<int, 256> table;
  table.fill(-1);
  for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kB64Chars[i])] = i;

  std::string out;
  out.reserve(data.size() / 4 * 3);
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : data) {
    if (c == '=' || std::isspace(static_cast<unsigned char>(c))) continue;
    int v = table[static_cast<unsigned char>(c)];
    if (v < 0) continue;
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

bool is_probably_text(std::string_view data) {
  for (unsigned char c : data) {
    if (c == 0) return false;
    if (c < 0x09) return false;
    if (c > 0x0d && c < 0x20) return false;
  }
  return true;
}

}  // namespace genomagent
