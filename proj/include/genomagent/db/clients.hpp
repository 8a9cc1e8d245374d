// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genomagent/db/transport.hpp"

namespace genomagent {

inline constexpr const char* kDefaultEutilsBase =
    "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/";
inline constexpr const char* kDefaultBlastBase =
    "https://blast.ncbi.nlm.nih.gov/Blast.cgi";
inline constexpr const char* kDefaultHgncBase = "https://rest.genenames.org/";
inline constexpr const char* kDefaultBlatBase =
    "https://genome.ucsc.edu/cgi-bin/hgBlat";

std::string url_encode(std::string_view value);

/// True for [ACGTN]+ sequences (case-insensitive) of at least `min_length`.
bool is_dna_sequence(std::string_view text, std::size_t min_length);

// ---------------------------------------------------------------------------

class EutilsClient {
 public:
  explicit EutilsClient(std::shared_ptr<HttpTransport> transport,
                        std::string base = kDefaultEutilsBase);

  /// esearch: returns record ids in response order; empty is a valid result.
  Result<std::vector<std::string>> search(const std::string& db, const std::string& term);

  /// esummary over the given ids; the parsed JSON document is returned whole.
  Result<nlohmann::json> summary(const std::string& db, const std::vector<std::string>& ids);

  ApiRequest search_request(const std::string& db, const std::string& term) const;
  ApiRequest summary_request(const std::string& db, const std::vector<std::string>& ids) const;

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string base_;
};

// ---------------------------------------------------------------------------

struct AlignmentHit {
  std::string chromosome;
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::string organism;
  double score = 0.0;

  std::string region() const;
};

struct BlastJob {
  std::string rid;
  enum class Status { Waiting, Ready, Failed } status = Status::Waiting;
  int poll_count = 0;
};

class BlastClient {
 public:
  explicit BlastClient(std::shared_ptr<HttpTransport> transport,
                       std::string base = kDefaultBlastBase);

  Result<BlastJob> submit(const std::string& sequence, const std::string& program,
                          const std::string& database);

  /// Polls until the job is ready (or max_polls is spent), then parses the
  /// report into hits sorted by score descending.
  Result<std::vector<AlignmentHit>> poll(BlastJob& job, int max_polls,
                                         std::chrono::milliseconds interval);

  ApiRequest submit_request(const std::string& sequence, const std::string& program,
                            const std::string& database) const;
  ApiRequest status_request(const std::string& rid) const;
  ApiRequest report_request(const std::string& rid) const;

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string base_;
};

/// Parses an NCBI single-file JSON report into hits sorted by descending
/// bit score. Exposed for fixture-driven tests.
Result<std::vector<AlignmentHit>> parse_blast_report(const std::string& body);

/// Maps RefSeq chromosome accessions (NC_000001..NC_000024, NC_012920) to
/// "chr1".."chr22"/"chrX"/"chrY"/"chrM"; falls back to "chromosome N" in the
/// title, then to the accession itself.
std::string chromosome_from_accession(const std::string& accession, const std::string& title);

// ---------------------------------------------------------------------------

struct GeneRecord {
  std::string symbol;
  std::string name;
  std::vector<std::string> aliases;
};

class HgncClient {
 public:
  explicit HgncClient(std::shared_ptr<HttpTransport> transport,
                      std::string base = kDefaultHgncBase);

  /// fetch/{field}/{value}; field is one of symbol, alias_symbol, prev_symbol.
  Result<std::vector<GeneRecord>> fetch(const std::string& field, const std::string& value);

  ApiRequest fetch_request(const std::string& field, const std::string& value) const;

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string base_;
};

// ---------------------------------------------------------------------------

class UcscClient {
 public:
  explicit UcscClient(std::shared_ptr<HttpTransport> transport,
                      std::string base = kDefaultBlatBase);

  /// BLAT the sequence against hg38; hits sorted by score descending.
  Result<std::vector<AlignmentHit>> blat(const std::string& sequence);

  ApiRequest blat_request(const std::string& sequence) const;

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string base_;
};

}  // namespace genomagent
