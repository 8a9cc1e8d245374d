// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genomagent/core/result.hpp"
#include "genomagent/core/types.hpp"

namespace genomagent {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::string collapse_whitespace(std::string_view s);

/// Replaces en/em dashes, minus signs and ".." range separators with "-".
std::string fold_range_separators(std::string_view s);

/// Canonicalizes a raw answer: lowercase, trim, collapse whitespace, strip
/// terminal punctuation. Interval-shaped text becomes "chr{N}:{start}-{end}";
/// bare chromosome labels on location tasks become "chr{N}". Idempotent.
std::string normalize_answer(std::string_view raw, TaskKind task);

/// Parses a chromosome-prefixed range such as "chr8:708-882" (also accepting
/// "–", "—" and ".." separators and a missing "chr" prefix). Fails when no
/// range is recognizable or start > end.
Result<GenomicInterval> parse_interval(std::string_view text);

std::string format_interval(const GenomicInterval& interval);

/// Splits predicted gene symbols on commas, semicolons and whitespace runs.
std::vector<std::string> split_symbols(std::string_view text);

}  // namespace genomagent
