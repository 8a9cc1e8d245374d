// SPDX-License-Identifier: Apache-2.0
#include "genomagent/db/clients.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <thread>

namespace genomagent {

using nlohmann::json;

std::string url_encode(std::string_view value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size());
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else if (c == ' ') {
      out.push_back('+');
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

bool is_dna_sequence(std::string_view text, std::size_t min_length) {
  if (text.size() < min_length) return false;
  for (char c : text) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'A':
      case 'C':
      case 'G':
      case 'T':
      case 'N':
        break;
      default:
        return false;
    }
  }
  return true;
}

namespace {

Result<json> parse_json_body(const ApiResponse& response, const std::string& what) {
  if (response.status != 200) {
    return make_error(Errc::HttpError,
                      what + " returned HTTP " + std::to_string(response.status));
  }
  json doc = json::parse(response.body, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::MalformedResponse, what + " body is not valid JSON");
  }
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// EutilsClient

EutilsClient::EutilsClient(std::shared_ptr<HttpTransport> transport, std::string base)
    : transport_(std::move(transport)), base_(std::move(base)) {}

ApiRequest EutilsClient::search_request(const std::string& db, const std::string& term) const {
  ApiRequest request;
  request.source = SourceId::NCBI_EUTILS;
  request.url = base_ + "esearch.fcgi?db=" + url_encode(db) + "&term=" + url_encode(term) +
                "&retmode=json";
  return request;
}

ApiRequest EutilsClient::summary_request(const std::string& db,
                                         const std::vector<std::string>& ids) const {
  std::string joined;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) joined.push_back(',');
    joined += ids[i];
  }
  ApiRequest request;
  request.source = SourceId::NCBI_EUTILS;
  request.url = base_ + "esummary.fcgi?db=" + url_encode(db) + "&id=" + url_encode(joined) +
                "&retmode=json";
  return request;
}

Result<std::vector<std::string>> EutilsClient::search(const std::string& db,
                                                      const std::string& term) {
  if (db != "gene" && db != "snp" && db != "omim") {
    return make_error(Errc::InvalidArgument, "unsupported E-utils db: " + db);
  }
  if (term.empty()) {
    return make_error(Errc::InvalidArgument, "esearch term must be nonempty");
  }

  auto response = transport_->send(search_request(db, term));
  if (!response.ok()) return response.error();
  auto doc = parse_json_body(response.value(), "esearch");
  if (!doc.ok()) return doc.error();

  const json& body = doc.value();
  if (!body.contains("esearchresult") || !body["esearchresult"].contains("idlist") ||
      !body["esearchresult"]["idlist"].is_array()) {
    return make_error(Errc::MalformedResponse, "esearch result missing idlist");
  }
  std::vector<std::string> ids;
  for (const auto& id : body["esearchresult"]["idlist"]) {
    if (!id.is_string()) return make_error(Errc::MalformedResponse, "non-string id in idlist");
    ids.push_back(id.get<std::string>());
  }
  return ids;
}

Result<json> EutilsClient::summary(const std::string& db, const std::vector<std::string>& ids) {
  if (db != "gene" && db != "snp" && db != "omim") {
    return make_error(Errc::InvalidArgument, "unsupported E-utils db: " + db);
  }
  if (ids.empty()) {
    return make_error(Errc::InvalidArgument, "esummary requires at least one id");
  }

  auto response = transport_->send(summary_request(db, ids));
  if (!response.ok()) return response.error();
  auto doc = parse_json_body(response.value(), "esummary");
  if (!doc.ok()) return doc;

  if (!doc.value().contains("result")) {
    return make_error(Errc::MalformedResponse, "esummary result missing 'result'");
  }
  return doc;
}

// ---------------------------------------------------------------------------
// BlastClient

std::string AlignmentHit::region() const {
  return chromosome + ":" + std::to_string(start) + "-" + std::to_string(end);
}

BlastClient::BlastClient(std::shared_ptr<HttpTransport> transport, std::string base)
    : transport_(std::move(transport)), base_(std::move(base)) {}

ApiRequest BlastClient::submit_request(const std::string& sequence, const std::string& program,
                                       const std::string& database) const {
  ApiRequest request;
  request.source = SourceId::BLAST;
  request.url = base_ + "?CMD=Put&PROGRAM=" + url_encode(program) +
                "&DATABASE=" + url_encode(database) + "&QUERY=" + url_encode(sequence);
  return request;
}

ApiRequest BlastClient::status_request(const std::string& rid) const {
  ApiRequest request;
  request.source = SourceId::BLAST;
  request.url = base_ + "?CMD=Get&FORMAT_OBJECT=SearchInfo&RID=" + url_encode(rid);
  return request;
}

ApiRequest BlastClient::report_request(const std::string& rid) const {
  ApiRequest request;
  request.source = SourceId::BLAST;
  request.url = base_ + "?CMD=Get&FORMAT_TYPE=JSON2_S&RID=" + url_encode(rid);
  return request;
}

Result<BlastJob> BlastClient::submit(const std::string& sequence, const std::string& program,
                                     const std::string& database) {
  if (!is_dna_sequence(sequence, 11)) {
    return make_error(Errc::InvalidArgument,
                      "BLAST query must be [ACGTN]+ of length >= 11");
  }

  auto response = transport_->send(submit_request(sequence, program, database));
  if (!response.ok()) return response.error();
  if (response.value().status != 200) {
    return make_error(Errc::HttpError,
                      "BLAST Put returned HTTP " + std::to_string(response.value().status));
  }

  static const std::regex rid_re(R"(RID\s*=\s*([A-Z0-9\-]+))");
  std::smatch m;
  if (!std::regex_search(response.value().body, m, rid_re)) {
    return make_error(Errc::RidNotFound, "no RID in BLAST Put response");
  }
  BlastJob job;
  job.rid = m[1].str();
  job.status = BlastJob::Status::Waiting;
  return job;
}

std::string chromosome_from_accession(const std::string& accession, const std::string& title) {
  static const std::regex nc_re(R"(NC_0*([0-9]+)(?:\.[0-9]+)?)");
  std::smatch m;
  if (std::regex_search(accession, m, nc_re)) {
    long n = std::strtol(m[1].str().c_str(), nullptr, 10);
    if (n >= 1 && n <= 22) return "chr" + std::to_string(n);
    if (n == 23) return "chrX";
    if (n == 24) return "chrY";
    if (n == 12920) return "chrM";
  }
  static const std::regex title_re(R"(chromosome\s+([0-9]{1,2}|X|Y))");
  if (std::regex_search(title, m, title_re)) {
    return "chr" + m[1].str();
  }
  return accession;
}

Result<std::vector<AlignmentHit>> parse_blast_report(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::MalformedResponse, "BLAST report is not valid JSON");
  }
  const json* search = nullptr;
  if (doc.contains("BlastOutput2")) {
    const json& out = doc["BlastOutput2"];
    if (out.is_array() && !out.empty()) {
      search = &out[0];
    } else if (out.is_object()) {
      search = &out;
    }
  }
  if (search == nullptr || !search->contains("report")) {
    return make_error(Errc::MalformedResponse, "BLAST report missing BlastOutput2.report");
  }
  const json& hits = (*search)["report"]["results"]["search"]["hits"];
  if (!hits.is_array()) {
    return make_error(Errc::MalformedResponse, "BLAST report missing hits array");
  }

  std::vector<AlignmentHit> parsed;
  for (const auto& hit : hits) {
    if (!hit.contains("description") || !hit.contains("hsps") || hit["hsps"].empty()) {
      continue;
    }
    const json& desc = hit["description"][0];
    const json& hsp = hit["hsps"][0];
    AlignmentHit out;
    out.organism = desc.value("sciname", "");
    out.chromosome =
        chromosome_from_accession(desc.value("accession", ""), desc.value("title", ""));
    std::uint64_t from = hsp.value("hit_from", 0ULL);
    std::uint64_t to = hsp.value("hit_to", 0ULL);
    out.start = std::min(from, to);
    out.end = std::max(from, to);
    out.score = hsp.value("bit_score", 0.0);
    parsed.push_back(std::move(out));
  }
  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const AlignmentHit& a, const AlignmentHit& b) { return a.score > b.score; });
  return parsed;
}

Result<std::vector<AlignmentHit>> BlastClient::poll(BlastJob& job, int max_polls,
                                                    std::chrono::milliseconds interval) {
  if (job.status == BlastJob::Status::Failed) {
    return make_error(Errc::JobFailed, "BLAST job " + job.rid + " already failed");
  }

  static const std::regex status_re(R"(Status=([A-Z]+))");
  for (int attempt = 0; attempt < max_polls; ++attempt) {
    if (attempt > 0 && interval.count() > 0) std::this_thread::sleep_for(interval);
    ++job.poll_count;

    auto status_response = transport_->send(status_request(job.rid));
    if (!status_response.ok()) return status_response.error();

    std::smatch m;
    std::string status = "UNKNOWN";
    if (std::regex_search(status_response.value().body, m, status_re)) status = m[1].str();

    if (status == "WAITING") continue;
    if (status == "FAILED" || status == "UNKNOWN") {
      job.status = BlastJob::Status::Failed;
      return make_error(Errc::JobFailed, "BLAST job " + job.rid + " status " + status);
    }

    job.status = BlastJob::Status::Ready;
    auto report_response = transport_->send(report_request(job.rid));
    if (!report_response.ok()) return report_response.error();
    if (report_response.value().status != 200) {
      return make_error(Errc::HttpError, "BLAST Get returned HTTP " +
                                             std::to_string(report_response.value().status));
    }
    return parse_blast_report(report_response.value().body);
  }
  return make_error(Errc::Timeout,
                    "BLAST job " + job.rid + " not ready after " + std::to_string(max_polls) +
                        " polls");
}

// ---------------------------------------------------------------------------
// HgncClient

HgncClient::HgncClient(std::shared_ptr<HttpTransport> transport, std::string base)
    : transport_(std::move(transport)), base_(std::move(base)) {}

ApiRequest HgncClient::fetch_request(const std::string& field, const std::string& value) const {
  ApiRequest request;
  request.source = SourceId::HGNC;
  request.url = base_ + "fetch/" + field + "/" + url_encode(value);
  return request;
}

Result<std::vector<GeneRecord>> HgncClient::fetch(const std::string& field,
                                                  const std::string& value) {
  if (field != "symbol" && field != "alias_symbol" && field != "prev_symbol") {
    return make_error(Errc::InvalidArgument, "unsupported HGNC field: " + field);
  }
  if (value.empty()) {
    return make_error(Errc::InvalidArgument, "HGNC fetch value must be nonempty");
  }

  auto response = transport_->send(fetch_request(field, value));
  if (!response.ok()) return response.error();
  auto doc = parse_json_body(response.value(), "HGNC fetch");
  if (!doc.ok()) return doc.error();

  const json& body = doc.value();
  if (!body.contains("response") || !body["response"].contains("docs") ||
      !body["response"]["docs"].is_array()) {
    return make_error(Errc::MalformedResponse, "HGNC response missing docs");
  }
  std::vector<GeneRecord> records;
  for (const auto& item : body["response"]["docs"]) {
    GeneRecord record;
    record.symbol = item.value("symbol", "");
    record.name = item.value("name", "");
    if (item.contains("alias_symbol") && item["alias_symbol"].is_array()) {
      for (const auto& alias : item["alias_symbol"]) {
        if (alias.is_string()) record.aliases.push_back(alias.get<std::string>());
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

// ---------------------------------------------------------------------------
// UcscClient

UcscClient::UcscClient(std::shared_ptr<HttpTransport> transport, std::string base)
    : transport_(std::move(transport)), base_(std::move(base)) {}

ApiRequest UcscClient::blat_request(const std::string& sequence) const {
  ApiRequest request;
  request.source = SourceId::UCSC;
  request.url = base_ + "?userSeq=" + url_encode(sequence) + "&type=DNA&db=hg38&output=json";
  return request;
}

Result<std::vector<AlignmentHit>> UcscClient::blat(const std::string& sequence) {
  if (!is_dna_sequence(sequence, 20)) {
    return make_error(Errc::InvalidArgument, "BLAT query must be [ACGTN]+ of length >= 20");
  }

  auto response = transport_->send(blat_request(sequence));
  if (!response.ok()) return response.error();
  auto doc = parse_json_body(response.value(), "BLAT");
  if (!doc.ok()) return doc.error();

  const json& body = doc.value();
  if (!body.contains("fields") || !body["fields"].is_array() || !body.contains("blat") ||
      !body["blat"].is_array()) {
    return make_error(Errc::MalformedResponse, "BLAT response missing fields/blat arrays");
  }

  auto index_of = [&](const std::string& name) -> int {
    const json& fields = body["fields"];
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].is_string() && fields[i].get<std::string>() == name) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  int matches_idx = index_of("matches");
  int tname_idx = index_of("tName");
  int tstart_idx = index_of("tStart");
  int tend_idx = index_of("tEnd");
  if (matches_idx < 0 || tname_idx < 0 || tstart_idx < 0 || tend_idx < 0) {
    return make_error(Errc::MalformedResponse, "BLAT fields missing required columns");
  }

  std::vector<AlignmentHit> hits;
  for (const auto& row : body["blat"]) {
    if (!row.is_array() ||
        static_cast<int>(row.size()) <= std::max({matches_idx, tname_idx, tstart_idx, tend_idx})) {
      return make_error(Errc::MalformedResponse, "BLAT row shorter than field list");
    }
    AlignmentHit hit;
    hit.score = row[static_cast<std::size_t>(matches_idx)].get<double>();
    hit.chromosome = row[static_cast<std::size_t>(tname_idx)].get<std::string>();
    hit.start = row[static_cast<std::size_t>(tstart_idx)].get<std::uint64_t>();
    hit.end = row[static_cast<std::size_t>(tend_idx)].get<std::uint64_t>();
    hits.push_back(std::move(hit));
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const AlignmentHit& a, const AlignmentHit& b) { return a.score > b.score; });
  return hits;
}

}  // namespace genomagent
