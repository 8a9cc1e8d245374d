// SPDX-License-Identifier: Apache-2.0
#include "genomagent/core/text.hpp"

#include <cctype>
#include <charconv>
#include <regex>

namespace genomagent {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Canonical chromosome token from a matched label: digits lose leading
// zeros, "mt" folds to "m".
std::string canonical_chrom_token(std::string token) {
  if (token == "mt") return "m";
  if (!token.empty() && std::isdigit(static_cast<unsigned char>(token[0]))) {
    std::size_t i = 0;
    while (i + 1 < token.size() && token[i] == '0') ++i;
    token.erase(0, i);
  }
  return token;
}

const std::regex& full_interval_re() {
  static const std::regex re(
      R"(^(?:chr)?\s*([0-9]{1,2}|[xym]|mt)\s*:\s*([0-9][0-9,]*)\s*-\s*([0-9][0-9,]*)$)");
  return re;
}

const std::regex& embedded_interval_re() {
  static const std::regex re(
      R"(chr\s*([0-9]{1,2}|[xym]|mt)\s*:\s*([0-9][0-9,]*)\s*-\s*([0-9][0-9,]*))");
  return re;
}

const std::regex& bare_chromosome_re() {
  static const std::regex re(R"(^(?:chromosome\s+|chr)?([0-9]{1,2}|[xy]|mt?)$)");
  return re;
}

std::optional<std::uint64_t> parse_position(std::string digits) {
  digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

Result<GenomicInterval> interval_from_match(const std::smatch& m) {
  auto start = parse_position(m[2].str());
  auto end = parse_position(m[3].str());
  if (!start || !end) {
    return make_error(Errc::ParseFailure, "interval position out of range");
  }
  if (*start > *end) {
    return make_error(Errc::ParseFailure, "interval start exceeds end");
  }
  GenomicInterval interval;
  interval.chromosome = "chr" + canonical_chrom_token(m[1].str());
  interval.start = *start;
  interval.end = *end;
  return interval;
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = false;
  for (char c : s) {
    if (is_space(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back(' ');
    in_ws = false;
    out.push_back(c);
  }
  return out;
}

std::string fold_range_separators(std::string_view s) {
  static const std::pair<std::string_view, std::string_view> kFolds[] = {
      {"\xE2\x80\x93", "-"},  // en dash
      {"\xE2\x80\x94", "-"},  // em dash
      {"\xE2\x88\x92", "-"},  // minus sign
      {"..", "-"},
  };
  std::string out(s);
  for (const auto& [from, to] : kFolds) {
    std::size_t pos = 0;
    while ((pos = out.find(from, pos)) != std::string::npos) {
      out.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return out;
}

std::string normalize_answer(std::string_view raw, TaskKind task) {
  std::string s = to_lower_ascii(collapse_whitespace(raw));
  // Whitespace strips together with terminal punctuation so runs like
  // "x? ." reduce in one pass.
  while (!s.empty()) {
    char last = s.back();
    if (last == '.' || last == '!' || last == '?' || last == ',' ||
        last == ';' || last == ':' || is_space(last)) {
      s.pop_back();
    } else {
      break;
    }
  }

  std::string folded = fold_range_separators(s);
  std::smatch m;
  if (std::regex_match(folded, m, full_interval_re())) {
    auto interval = interval_from_match(m);
    if (interval.ok()) return format_interval(interval.value());
  }

  // Location answers come back as bare chromosome labels from several
  // sources; canonicalize them so "20" and "chr20" compare equal.
  if (task == TaskKind::GeneLocation || task == TaskKind::SnpLocation) {
    if (std::regex_match(s, m, bare_chromosome_re())) {
      return "chr" + canonical_chrom_token(m[1].str());
    }
  }
  return s;
}

Result<GenomicInterval> parse_interval(std::string_view text) {
  std::string s = fold_range_separators(to_lower_ascii(collapse_whitespace(text)));

  std::smatch m;
  if (std::regex_match(s, m, full_interval_re())) {
    return interval_from_match(m);
  }
  if (std::regex_search(s, m, embedded_interval_re())) {
    return interval_from_match(m);
  }
  return make_error(Errc::ParseFailure, "no chromosome-prefixed range in: " + s);
}

std::string format_interval(const GenomicInterval& interval) {
  return interval.chromosome + ":" + std::to_string(interval.start) + "-" +
         std::to_string(interval.end);
}

std::vector<std::string> split_symbols(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',' || c == ';' || is_space(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace genomagent
