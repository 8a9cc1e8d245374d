// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "genomagent/core/digest.hpp"
#include "genomagent/db/clients.hpp"
#include "genomagent/db/transport.hpp"

using namespace genomagent;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_temp_dir(const char* tag) {
  auto dir = fs::temp_directory_path() / (std::string("genomagent_db_") + tag + "_" +
                                          std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Transport serving canned responses keyed by canonical URL.
class StubTransport : public HttpTransport {
 public:
  void add(const std::string& url, ApiResponse response) {
    responses_[canonical_url(url)] = std::move(response);
  }
  Result<ApiResponse> send(const ApiRequest& request) override {
    ++calls_;
    auto it = responses_.find(canonical_url(request.url));
    if (it == responses_.end()) {
      return make_error(Errc::HttpError, "stub has no response for " + request.url);
    }
    return it->second;
  }
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, ApiResponse> responses_;
  std::size_t calls_ = 0;
};

ApiResponse json_ok(const json& body) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Json;
  response.body = body.dump();
  return response;
}

ApiResponse text_ok(const std::string& body) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Text;
  response.body = body;
  return response;
}

const char* kSeq = "GTGGGCTGAAAAGCTCCCGATTATAGGGTTTCTCTCTTTC";

}  // namespace

// ---------------------------------------------------------------------------
// FixtureStore

TEST_CASE("fixture store records every response before returning it") {
  auto dir = fresh_temp_dir("record");
  auto stub = std::make_shared<StubTransport>();
  stub->add("https://x.org/a?k=1", json_ok(json{{"v", 1}}));

  FixtureStore store(dir, FixtureMode::Record, stub);
  ApiRequest request;
  request.source = SourceId::NCBI_EUTILS;
  request.url = "https://x.org/a?k=1";

  auto response = store.send(request);
  REQUIRE(response.ok());
  CHECK(fs::exists(store.path_for(request)));

  // Replay serves the same bytes with no inner transport at all.
  FixtureStore replay(dir, FixtureMode::Replay, nullptr);
  auto replayed = replay.send(request);
  REQUIRE(replayed.ok());
  CHECK(replayed.value().body == response.value().body);
  CHECK(replayed.value().content_kind == ContentKind::Json);
  fs::remove_all(dir);
}

TEST_CASE("replay is hermetic: misses fail fast, the network is never touched") {
  auto dir = fresh_temp_dir("hermetic");
  auto denying = std::make_shared<DenyingTransport>();
  FixtureStore store(dir, FixtureMode::Replay, denying);

  ApiRequest request;
  request.url = "https://never-recorded.org/x";
  auto response = store.send(request);
  REQUIRE(!response.ok());
  CHECK(response.error().code == Errc::FixtureMiss);
  CHECK(denying->attempts() == 0);
  fs::remove_all(dir);
}

TEST_CASE("passthrough mode forwards to the inner transport without persisting") {
  auto dir = fresh_temp_dir("passthrough");
  auto stub = std::make_shared<StubTransport>();
  stub->add("https://x.org/a", text_ok("live body"));

  FixtureStore store(dir, FixtureMode::Passthrough, stub);
  ApiRequest request;
  request.url = "https://x.org/a";
  auto response = store.send(request);
  REQUIRE(response.ok());
  CHECK(response.value().body == "live body");
  CHECK(stub->calls() == 1);
  CHECK(!fs::exists(store.path_for(request)));
  fs::remove_all(dir);
}

TEST_CASE("request digests are stable and ignore volatile parameters") {
  ApiRequest a;
  a.url = "https://e.org/q?b=2&a=1&api_key=SECRET1";
  ApiRequest b;
  b.url = "https://e.org/q?a=1&b=2&api_key=DIFFERENT";
  CHECK(FixtureStore::request_digest(a) == FixtureStore::request_digest(b));

  ApiRequest c;
  c.url = "https://e.org/q?a=1&b=3";
  CHECK(FixtureStore::request_digest(a) != FixtureStore::request_digest(c));
}

TEST_CASE("re-recording overwrites the fixture atomically") {
  auto dir = fresh_temp_dir("rerecord");
  auto stub = std::make_shared<StubTransport>();
  stub->add("https://x.org/a", text_ok("v1"));

  FixtureStore store(dir, FixtureMode::Record, stub);
  ApiRequest request;
  request.url = "https://x.org/a";
  REQUIRE(store.send(request).ok());

  stub->add("https://x.org/a", text_ok("v2"));
  REQUIRE(store.send(request).ok());

  FixtureStore replay(dir, FixtureMode::Replay, nullptr);
  CHECK(replay.send(request).value().body == "v2");
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// E-utils

TEST_CASE("esearch returns ids in order; no hits is a valid empty list") {
  auto stub = std::make_shared<StubTransport>();
  EutilsClient client(stub);
  stub->add(client.search_request("gene", "LMP10").url,
            json_ok(json{{"esearchresult", {{"idlist", {"5699", "123"}}}}}));
  stub->add(client.search_request("gene", "zzzz_no_such_gene_zzzz").url,
            json_ok(json{{"esearchresult", {{"idlist", json::array()}}}}));

  auto ids = client.search("gene", "LMP10");
  REQUIRE(ids.ok());
  CHECK(ids.value() == std::vector<std::string>{"5699", "123"});

  auto empty = client.search("gene", "zzzz_no_such_gene_zzzz");
  REQUIRE(empty.ok());
  CHECK(empty.value().empty());
}

TEST_CASE("esearch rejects out-of-whitelist databases and empty terms") {
  auto stub = std::make_shared<StubTransport>();
  EutilsClient client(stub);
  CHECK(client.search("protein", "x").error().code == Errc::InvalidArgument);
  CHECK(client.search("gene", "").error().code == Errc::InvalidArgument);
  CHECK(stub->calls() == 0);
}

TEST_CASE("esummary parses the document and enforces nonempty ids") {
  auto stub = std::make_shared<StubTransport>();
  EutilsClient client(stub);
  stub->add(client.summary_request("gene", {"5699"}).url,
            json_ok(json{{"result",
                          {{"uids", {"5699"}},
                           {"5699", {{"name", "PSMB10"}, {"chromosome", "16"}}}}}}));

  auto summary = client.summary("gene", {"5699"});
  REQUIRE(summary.ok());
  CHECK(summary.value()["result"]["5699"]["chromosome"] == "16");

  CHECK(client.summary("gene", {}).error().code == Errc::InvalidArgument);
}

TEST_CASE("truncated eutils bodies are rejected, never partially parsed") {
  auto stub = std::make_shared<StubTransport>();
  EutilsClient client(stub);
  ApiResponse truncated;
  truncated.status = 200;
  truncated.content_kind = ContentKind::Json;
  truncated.body = R"({"esearchresult": {"idlist": ["1", "2")";  // cut mid-stream
  stub->add(client.search_request("gene", "X").url, truncated);

  auto result = client.search("gene", "X");
  REQUIRE(!result.ok());
  CHECK(result.error().code == Errc::MalformedResponse);
}

TEST_CASE("http error statuses surface as HttpError") {
  auto stub = std::make_shared<StubTransport>();
  EutilsClient client(stub);
  ApiResponse err;
  err.status = 500;
  err.body = "oops";
  stub->add(client.search_request("gene", "X").url, err);
  CHECK(client.search("gene", "X").error().code == Errc::HttpError);
}

// ---------------------------------------------------------------------------
// BLAST

TEST_CASE("blast submit parses the RID") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  stub->add(client.submit_request(kSeq, "megablast", "core_nt").url,
            text_ok("<p>ok</p>\n  RID = ABC123XY\n  RTOE = 15\n"));

  auto job = client.submit(kSeq, "megablast", "core_nt");
  REQUIRE(job.ok());
  CHECK(job.value().rid == "ABC123XY");
  CHECK(job.value().status == BlastJob::Status::Waiting);
}

TEST_CASE("blast submit preconditions") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  CHECK(client.submit("XYZ", "megablast", "nt").error().code == Errc::InvalidArgument);
  CHECK(client.submit("ACGTACGT", "megablast", "nt").error().code ==
        Errc::InvalidArgument);  // below the 11-base minimum
  CHECK(stub->calls() == 0);
}

TEST_CASE("blast submit without an RID is RidNotFound") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  stub->add(client.submit_request(kSeq, "megablast", "core_nt").url, text_ok("<p>busy</p>"));
  CHECK(client.submit(kSeq, "megablast", "core_nt").error().code == Errc::RidNotFound);
}

TEST_CASE("blast poll parses a ready report with hits sorted by score") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  stub->add(client.status_request("R1").url, text_ok("Status=READY\n"));

  json report = {
      {"BlastOutput2",
       json::array(
           {json{{"report",
                  {{"results",
                    {{"search",
                      {{"hits",
                        json::array(
                            {json{{"description",
                                   json::array({json{{"accession", "NC_000002"},
                                                     {"title", "Homo sapiens chromosome 2"},
                                                     {"sciname", "Homo sapiens"}}})},
                                  {"hsps", json::array({json{{"bit_score", 100.0},
                                                             {"hit_from", 10},
                                                             {"hit_to", 50}}})}},
                             json{{"description",
                                   json::array({json{{"accession", "NC_000015"},
                                                     {"title", "Homo sapiens chromosome 15"},
                                                     {"sciname", "Homo sapiens"}}})},
                                  {"hsps", json::array({json{{"bit_score", 250.0},
                                                             {"hit_from", 91950932},
                                                             {"hit_to", 91950805}}})}}})}}}}}}}}})},
  };
  stub->add(client.report_request("R1").url, json_ok(report));

  BlastJob job;
  job.rid = "R1";
  auto hits = client.poll(job, 3, std::chrono::milliseconds(0));
  REQUIRE(hits.ok());
  REQUIRE(hits.value().size() == 2);
  CHECK(hits.value()[0].chromosome == "chr15");
  CHECK(hits.value()[0].score == 250.0);
  CHECK(hits.value()[0].start == 91950805);  // from/to normalized
  CHECK(hits.value()[0].end == 91950932);
  CHECK(hits.value()[0].region() == "chr15:91950805-91950932");
  CHECK(hits.value()[0].organism == "Homo sapiens");
  CHECK(job.status == BlastJob::Status::Ready);
}

TEST_CASE("blast poll on a failed job fails immediately") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  BlastJob job;
  job.rid = "R2";
  job.status = BlastJob::Status::Failed;
  CHECK(client.poll(job, 3, std::chrono::milliseconds(0)).error().code == Errc::JobFailed);
}

TEST_CASE("blast poll exhausting its budget is a timeout") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  stub->add(client.status_request("R3").url, text_ok("Status=WAITING\n"));

  BlastJob job;
  job.rid = "R3";
  CHECK(client.poll(job, 0, std::chrono::milliseconds(0)).error().code == Errc::Timeout);
  CHECK(client.poll(job, 2, std::chrono::milliseconds(0)).error().code == Errc::Timeout);
  CHECK(job.poll_count == 2);
}

TEST_CASE("blast failed status is JobFailed and transitions the job") {
  auto stub = std::make_shared<StubTransport>();
  BlastClient client(stub);
  stub->add(client.status_request("R4").url, text_ok("Status=FAILED\n"));

  BlastJob job;
  job.rid = "R4";
  CHECK(client.poll(job, 3, std::chrono::milliseconds(0)).error().code == Errc::JobFailed);
  CHECK(job.status == BlastJob::Status::Failed);
}

TEST_CASE("chromosome accession mapping") {
  CHECK(chromosome_from_accession("NC_000001", "") == "chr1");
  CHECK(chromosome_from_accession("NC_000015.10", "") == "chr15");
  CHECK(chromosome_from_accession("NC_000023", "") == "chrX");
  CHECK(chromosome_from_accession("NC_000024", "") == "chrY");
  CHECK(chromosome_from_accession("NC_012920.1", "") == "chrM");
  CHECK(chromosome_from_accession("NW_1234", "Homo sapiens chromosome 7 patch") == "chr7");
  CHECK(chromosome_from_accession("NC_003281", "Caenorhabditis elegans chromosome II") ==
        "NC_003281");
}

// ---------------------------------------------------------------------------
// HGNC

TEST_CASE("hgnc fetch parses records") {
  auto stub = std::make_shared<StubTransport>();
  HgncClient client(stub);
  stub->add("https://rest.genenames.org/fetch/alias_symbol/LMP10",
            json_ok(json{{"response",
                          {{"numFound", 1},
                           {"docs", json::array({json{{"symbol", "PSMB10"},
                                                      {"name", "proteasome subunit beta 10"},
                                                      {"alias_symbol", {"LMP10", "MECL1"}}}})}}}}));

  auto records = client.fetch("alias_symbol", "LMP10");
  REQUIRE(records.ok());
  REQUIRE(records.value().size() == 1);
  CHECK(records.value()[0].symbol == "PSMB10");
  CHECK(records.value()[0].aliases == std::vector<std::string>{"LMP10", "MECL1"});
}

TEST_CASE("hgnc fetch: empty docs, bad field, empty value") {
  auto stub = std::make_shared<StubTransport>();
  HgncClient client(stub);
  stub->add("https://rest.genenames.org/fetch/symbol/zzzz",
            json_ok(json{{"response", {{"numFound", 0}, {"docs", json::array()}}}}));

  auto none = client.fetch("symbol", "zzzz");
  REQUIRE(none.ok());
  CHECK(none.value().empty());

  CHECK(client.fetch("ensembl_gene_id", "x").error().code == Errc::InvalidArgument);
  CHECK(client.fetch("symbol", "").error().code == Errc::InvalidArgument);
}

// ---------------------------------------------------------------------------
// UCSC BLAT

TEST_CASE("blat parses rows via the fields header, sorted by matches") {
  auto stub = std::make_shared<StubTransport>();
  UcscClient client(stub);
  json body = {
      {"fields", json::array({"matches", "strand", "tName", "tStart", "tEnd"})},
      {"blat", json::array({json::array({90, "+", "chr3", 100, 200}),
                            json::array({128, "+", "chr15", 91950805, 91950932})})},
  };
  stub->add(client.blat_request(kSeq).url, json_ok(body));

  auto hits = client.blat(kSeq);
  REQUIRE(hits.ok());
  REQUIRE(hits.value().size() == 2);
  CHECK(hits.value()[0].chromosome == "chr15");
  CHECK(hits.value()[0].score == 128);
  CHECK(hits.value()[1].chromosome == "chr3");
}

TEST_CASE("blat rejects sequences below the 20-base minimum") {
  auto stub = std::make_shared<StubTransport>();
  UcscClient client(stub);
  CHECK(client.blat("ACGTACGTACGTACGTACG").error().code == Errc::InvalidArgument);  // 19
  CHECK(stub->calls() == 0);
}

TEST_CASE("blat zero hits is a valid empty list") {
  auto stub = std::make_shared<StubTransport>();
  UcscClient client(stub);
  json body = {{"fields", json::array({"matches", "tName", "tStart", "tEnd"})},
               {"blat", json::array()}};
  stub->add(client.blat_request(kSeq).url, json_ok(body));
  auto hits = client.blat(kSeq);
  REQUIRE(hits.ok());
  CHECK(hits.value().empty());
}

TEST_CASE("blat row shorter than the field list is malformed") {
  auto stub = std::make_shared<StubTransport>();
  UcscClient client(stub);
  json body = {{"fields", json::array({"matches", "tName", "tStart", "tEnd"})},
               {"blat", json::array({json::array({1, "chr1"})})}};
  stub->add(client.blat_request(kSeq).url, json_ok(body));
  CHECK(client.blat(kSeq).error().code == Errc::MalformedResponse);
}

TEST_CASE("dna alphabet check") {
  CHECK(is_dna_sequence("ACGTNacgtn", 10));
  CHECK(!is_dna_sequence("ACGU", 4));
  CHECK(!is_dna_sequence("ACGT", 5));
}

TEST_CASE("every parser rejects truncated bodies outright") {
  CHECK(parse_blast_report(R"({"BlastOutput2":[{"report)").error().code ==
        Errc::MalformedResponse);

  auto stub = std::make_shared<StubTransport>();
  HgncClient hgnc(stub);
  ApiResponse cut;
  cut.status = 200;
  cut.content_kind = ContentKind::Json;
  cut.body = R"({"response":{"docs":[{"sym)";
  stub->add("https://rest.genenames.org/fetch/symbol/X", cut);
  CHECK(hgnc.fetch("symbol", "X").error().code == Errc::MalformedResponse);

  UcscClient ucsc(stub);
  stub->add(ucsc.blat_request(kSeq).url, cut);
  CHECK(ucsc.blat(kSeq).error().code == Errc::MalformedResponse);
}

// ---------------------------------------------------------------------------
// Replay over the checked-in fixture set: the full client stack offline.

namespace {

std::shared_ptr<FixtureStore> repo_fixtures() {
  return std::make_shared<FixtureStore>(fs::path(REPO_ROOT) / "fixtures", FixtureMode::Replay,
                                        std::make_shared<DenyingTransport>());
}

}  // namespace

TEST_CASE("bundled fixtures: LMP10 search resolves to the PSMB10 summary") {
  EutilsClient client(repo_fixtures());
  auto ids = client.search("gene", "LMP10[All Fields] AND human[orgn]");
  REQUIRE(ids.ok());
  REQUIRE(!ids.value().empty());

  auto summary = client.summary("gene", ids.value());
  REQUIRE(summary.ok());
  CHECK(summary.value().dump().find("PSMB10") != std::string::npos);
}

TEST_CASE("bundled fixtures: snp summary carries the mapped gene symbol") {
  EutilsClient client(repo_fixtures());
  auto ids = client.search("snp", "rs1217074595");
  REQUIRE(ids.ok());
  REQUIRE(!ids.value().empty());
  auto summary = client.summary("snp", ids.value());
  REQUIRE(summary.ok());
  CHECK(summary.value().dump().find("LINC01270") != std::string::npos);
}

TEST_CASE("bundled fixtures: hgnc fetch agrees with the NCBI summary") {
  auto fixtures = repo_fixtures();
  HgncClient hgnc(fixtures);
  auto records = hgnc.fetch("alias_symbol", "LMP10");
  REQUIRE(records.ok());
  REQUIRE(records.value().size() == 1);
  CHECK(records.value()[0].symbol == "PSMB10");

  // Cross-check: the E-utils route names the same approved symbol.
  EutilsClient eutils(fixtures);
  auto ids = eutils.search("gene", "LMP10[All Fields] AND human[orgn]");
  REQUIRE(ids.ok());
  auto summary = eutils.summary("gene", ids.value());
  REQUIRE(summary.ok());
  CHECK(summary.value()["result"][ids.value()[0]]["name"] == records.value()[0].symbol);
}

TEST_CASE("bundled fixtures: blast and blat report the same top region") {
  const std::string sequence =
      "GTGGGCTGAAAAGCTCCCGATTATAGGGTTTCTCTCTTTCTCTTTATGGGGAGGGGGAGGGAATTTAGAG"
      "GGAAGGGACTGAGGGAAGGGGACTAAGAGTGATGGGTTTCCCTGGAGCCATCTGTAGG";

  auto fixtures = repo_fixtures();
  BlastClient blast(fixtures);
  auto job = blast.submit(sequence, "megablast", "core_nt");
  REQUIRE(job.ok());
  auto blast_hits = blast.poll(job.value(), 3, std::chrono::milliseconds(0));
  REQUIRE(blast_hits.ok());
  REQUIRE(!blast_hits.value().empty());

  UcscClient ucsc(fixtures);
  auto blat_hits = ucsc.blat(sequence);
  REQUIRE(blat_hits.ok());
  REQUIRE(!blat_hits.value().empty());

  CHECK(blast_hits.value()[0].chromosome == blat_hits.value()[0].chromosome);
  CHECK(blast_hits.value()[0].region() == blat_hits.value()[0].region());
  CHECK(blast_hits.value()[0].organism == "Homo sapiens");
}
