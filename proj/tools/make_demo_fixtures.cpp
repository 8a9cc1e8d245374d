// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the offline demo set: the 9-item benchmark sample under
// data/geneturing/ and the matching API fixtures under fixtures/. Fixture
// bodies mirror the real wire formats (esearch/esummary JSON, BLAST JSON2,
// BLAT JSON, an HGNC search page) so the parsers see production shapes.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "genomagent/db/clients.hpp"
#include "genomagent/db/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace genomagent;

namespace {

// 128-mer aligned to chr15:91950805-91950932 in the demo.
constexpr const char* kHumanSequence =
    "GTGGGCTGAAAAGCTCCCGATTATAGGGTTTCTCTCTTTCTCTTTATGGGGAGGGGGAGGGAATTTAGAG"
    "GGAAGGGACTGAGGGAAGGGGACTAAGAGTGATGGGTTTCCCTGGAGCCATCTGTAGG";

// 96-mer attributed to Caenorhabditis elegans in the demo.
constexpr const char* kWormSequence =
    "AGGGGCAGCAAACACCGGGACACACCCATTCGTGCACTAATCAGAAACTTTTTTTTCTCAAATAATTCAA"
    "ACAATCAAAATTGGTTTTTTCGAGTC";

void must(const Result<void>& result, const std::string& what) {
  if (!result.ok()) {
    std::cerr << what << ": " << result.error().message << "\n";
    std::exit(1);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  out << content;
}

ApiResponse json_ok(const json& body) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = ContentKind::Json;
  response.body = body.dump();
  return response;
}

ApiResponse text_ok(const std::string& body, ContentKind kind) {
  ApiResponse response;
  response.status = 200;
  response.content_kind = kind;
  response.body = body;
  return response;
}

json esearch_body(const std::vector<std::string>& ids) {
  json idlist = json::array();
  for (const auto& id : ids) idlist.push_back(id);
  return json{
      {"header", {{"type", "esearch"}, {"version", "0.3"}}},
      {"esearchresult",
       {{"count", std::to_string(ids.size())}, {"retmax", std::to_string(ids.size())},
        {"retstart", "0"}, {"idlist", idlist}}},
  };
}

json esummary_body(const std::vector<std::pair<std::string, json>>& records) {
  json result;
  json uids = json::array();
  for (const auto& [uid, fields] : records) {
    uids.push_back(uid);
    json record = fields;
    record["uid"] = uid;
    result[uid] = record;
  }
  result["uids"] = uids;
  return json{{"header", {{"type", "esummary"}, {"version", "0.3"}}}, {"result", result}};
}

json blast_report(const std::string& program, const json& hits) {
  return json{{"BlastOutput2",
               json::array({json{{"report",
                                  {{"program", program},
                                   {"version", program + " 2.16.0+"},
                                   {"results", {{"search", {{"hits", hits}}}}}}}}})}};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = argc > 1 ? argv[1] : ".";
  fs::path data_dir = root / "data" / "geneturing";
  fs::path fixture_dir = root / "fixtures";

  // ------------------------------------------------------------------
  // Benchmark sample: one question per task, production phrasings.

  write_file(data_dir / "gene_alias.json",
             json{{"What is the official gene symbol of LMP10?", "PSMB10"}}.dump(2) + "\n");
  write_file(data_dir / "gene_name_conversion.json",
             json{{"Convert ENSG00000205403 to its official gene symbol.", "CFI"}}.dump(2) +
                 "\n");
  write_file(data_dir / "snp_association.json",
             json{{"Which gene is SNP rs1217074595 associated with?", "LINC01270"}}.dump(2) +
                 "\n");
  write_file(
      data_dir / "gene_location.json",
      json{{"Which chromosome is gene SNAP25 located on in the human genome?", "chr20"}}.dump(
          2) +
          "\n");
  write_file(data_dir / "snp_location.json",
             json{{"Which chromosome does SNP rs1430464868 locate on the human genome?",
                   "chr13"}}
                     .dump(2) +
                 "\n");
  write_file(data_dir / "disease_association.json",
             json::array({json{
                 {"question", "What are genes related to Distal renal tubular acidosis?"},
                 {"answer", json::array({"SLC4A1", "ATP6V1B1", "ATP6V0A4"})},
             }}).dump(2) +
                 "\n");
  write_file(data_dir / "protein_coding_genes.json",
             json{{"Is LRRC32 a protein-coding gene?", "TRUE"}}.dump(2) + "\n");
  write_file(data_dir / "dna_to_human.json",
             json::array({json{
                 {"question", std::string("Align the DNA sequence to the human genome: ") +
                                  kHumanSequence},
                 {"answer", "chr15:91950805-91950932"},
             }}).dump(2) +
                 "\n");
  write_file(data_dir / "dna_to_species.json",
             json{{std::string("Which organism does the DNA sequence come from: ") +
                       kWormSequence,
                   "worm"}}
                     .dump(2) +
                 "\n");

  // ------------------------------------------------------------------
  // API fixtures.

  FixtureStore store(fixture_dir, FixtureMode::Replay, nullptr);
  EutilsClient eutils(nullptr);
  BlastClient blast(nullptr);
  UcscClient ucsc(nullptr);

  auto put = [&](const ApiRequest& request, const ApiResponse& response, const char* what) {
    must(store.store(request, response), what);
  };

  // Gene alias: LMP10 -> PSMB10 (gene id 5699).
  put(eutils.search_request("gene", "LMP10[All Fields] AND human[orgn]"),
      json_ok(esearch_body({"5699"})), "esearch LMP10");
  put(eutils.summary_request("gene", {"5699"}),
      json_ok(esummary_body({{"5699",
                              json{{"name", "PSMB10"},
                                   {"description", "proteasome 20S subunit beta 10"},
                                   {"chromosome", "16"},
                                   {"maplocation", "16q22.1"},
                                   {"genetype", "protein-coding"},
                                   {"otheraliases", "LMP10, MECL1, beta2i"}}}})),
      "esummary PSMB10");

  HgncClient hgnc(nullptr);
  put(hgnc.fetch_request("alias_symbol", "LMP10"),
      json_ok(json{{"responseHeader", {{"status", 0}}},
                   {"response",
                    {{"numFound", 1},
                     {"docs", json::array({json{
                                  {"hgnc_id", "HGNC:9538"},
                                  {"symbol", "PSMB10"},
                                  {"name", "proteasome 20S subunit beta 10"},
                                  {"alias_symbol", json::array({"LMP10", "MECL1", "beta2i"})},
                              }})}}}}),
      "HGNC REST LMP10");

  std::string hgnc_page =
      "<!DOCTYPE html>\n"
      "<html><head><title>Symbol search</title></head>\n"
      "<body>\n"
      "<h1>Search results</h1>\n"
      "<table class=\"searchresults\">\n"
      "<tr><th>Approved symbol</th><th>Name</th><th>Aliases</th></tr>\n"
      "<tr><td class=\"symbol\">PSMB10</td><td class=\"name\">proteasome 20S subunit beta 10"
      "</td><td class=\"alias\">LMP10, MECL1</td></tr>\n"
      "</table>\n"
      "</body></html>\n";
  {
    ApiRequest request;
    request.source = SourceId::HGNC;
    request.url = "https://www.genenames.org/tools/search/?query=LMP10";
    put(request, text_ok(hgnc_page, ContentKind::Html), "HGNC page LMP10");
  }

  // Name conversion: ENSG00000205403 -> CFI (gene id 3426).
  put(eutils.search_request("gene", "ENSG00000205403[All Fields]"),
      json_ok(esearch_body({"3426"})), "esearch ENSG00000205403");
  put(eutils.summary_request("gene", {"3426"}),
      json_ok(esummary_body({{"3426",
                              json{{"name", "CFI"},
                                   {"description", "complement factor I"},
                                   {"chromosome", "4"},
                                   {"genetype", "protein-coding"}}}})),
      "esummary CFI");

  // SNP association: rs1217074595 -> LINC01270.
  put(eutils.search_request("snp", "rs1217074595"), json_ok(esearch_body({"1217074595"})),
      "esearch rs1217074595");
  put(eutils.summary_request("snp", {"1217074595"}),
      json_ok(esummary_body(
          {{"1217074595",
            json{{"snp_id", 1217074595},
                 {"chr", "20"},
                 {"chrpos", "20:50298394"},
                 {"genes", json::array({json{{"name", "LINC01270"}, {"gene_id", "284751"}}})},
                 {"snp_class", "snv"}}}})),
      "esummary rs1217074595");

  // Gene location: SNAP25 on chr20 (gene id 6616).
  put(eutils.search_request("gene", "SNAP25[sym] AND human[orgn]"),
      json_ok(esearch_body({"6616"})), "esearch SNAP25");
  put(eutils.summary_request("gene", {"6616"}),
      json_ok(esummary_body({{"6616",
                              json{{"name", "SNAP25"},
                                   {"description", "synaptosome associated protein 25"},
                                   {"chromosome", "20"},
                                   {"maplocation", "20p12.2"},
                                   {"genetype", "protein-coding"}}}})),
      "esummary SNAP25");

  // SNP location: rs1430464868 on chr13.
  put(eutils.search_request("snp", "rs1430464868"), json_ok(esearch_body({"1430464868"})),
      "esearch rs1430464868");
  put(eutils.summary_request("snp", {"1430464868"}),
      json_ok(esummary_body({{"1430464868",
                              json{{"snp_id", 1430464868},
                                   {"chr", "13"},
                                   {"chrpos", "13:51067356"},
                                   {"genes", json::array()},
                                   {"snp_class", "snv"}}}})),
      "esummary rs1430464868");

  // Disease association: distal renal tubular acidosis genes.
  put(eutils.search_request("gene", "Distal renal tubular acidosis AND human[orgn]"),
      json_ok(esearch_body({"6521", "525", "50617"})), "esearch dRTA");
  put(eutils.summary_request("gene", {"6521", "525", "50617"}),
      json_ok(esummary_body({
          {"6521", json{{"name", "SLC4A1"}, {"chromosome", "17"}, {"genetype", "protein-coding"}}},
          {"525", json{{"name", "ATP6V1B1"}, {"chromosome", "2"}, {"genetype", "protein-coding"}}},
          {"50617",
           json{{"name", "ATP6V0A4"}, {"chromosome", "7"}, {"genetype", "protein-coding"}}},
      })),
      "esummary dRTA genes");

  // Protein-coding: LRRC32 (gene id 2615).
  put(eutils.search_request("gene", "LRRC32[sym] AND human[orgn]"),
      json_ok(esearch_body({"2615"})), "esearch LRRC32");
  put(eutils.summary_request("gene", {"2615"}),
      json_ok(esummary_body({{"2615",
                              json{{"name", "LRRC32"},
                                   {"description", "leucine rich repeat containing 32"},
                                   {"chromosome", "11"},
                                   {"genetype", "protein-coding"}}}})),
      "esummary LRRC32");

  // DNA -> human genome: BLAST submit/status/report plus a BLAT agreement.
  put(blast.submit_request(kHumanSequence, "megablast", "core_nt"),
      text_ok("<p>Request accepted</p>\n    RID = DEMOHUMAN01\n    RTOE = 15\n",
              ContentKind::Html),
      "BLAST put human");
  put(blast.status_request("DEMOHUMAN01"),
      text_ok("QBlastInfoBegin\n\tStatus=READY\n\tThereAreHits=yes\nQBlastInfoEnd\n",
              ContentKind::Text),
      "BLAST status human");
  put(blast.report_request("DEMOHUMAN01"),
      json_ok(blast_report(
          "megablast",
          json::array({json{
              {"num", 1},
              {"description",
               json::array({json{{"id", "gi|2194572178|ref|NC_000015.10|"},
                                 {"accession", "NC_000015"},
                                 {"title", "Homo sapiens chromosome 15, GRCh38.p14 Primary "
                                           "Assembly"},
                                 {"sciname", "Homo sapiens"},
                                 {"taxid", 9606}}})},
              {"len", 101991189},
              {"hsps", json::array({json{{"num", 1},
                                         {"bit_score", 237.2},
                                         {"score", 128},
                                         {"evalue", 3.1e-58},
                                         {"identity", 128},
                                         {"hit_from", 91950805},
                                         {"hit_to", 91950932},
                                         {"align_len", 128}}})},
          }}))),
      "BLAST report human");

  {
    json blat_body = {
        {"track", "blat"},
        {"genome", "hg38"},
        {"fields",
         json::array({"matches", "misMatches", "repMatches", "nCount", "qNumInsert",
                      "qBaseInsert", "tNumInsert", "tBaseInsert", "strand", "qName", "qSize",
                      "qStart", "qEnd", "tName", "tSize", "tStart", "tEnd", "blockCount",
                      "blockSizes", "qStarts", "tStarts"})},
        {"blat",
         json::array({json::array({128, 0, 0, 0, 0, 0, 0, 0, "+", "YourSeq", 128, 0, 128,
                                   "chr15", 101991189, 91950805, 91950932, 1, "128,", "0,",
                                   "91950805,"})})},
    };
    put(ucsc.blat_request(kHumanSequence), json_ok(blat_body), "BLAT human");
  }

  // DNA -> species: BLAST against nt attributes the read to C. elegans.
  put(blast.submit_request(kWormSequence, "blastn", "nt"),
      text_ok("<p>Request accepted</p>\n    RID = DEMOWORM02\n    RTOE = 20\n",
              ContentKind::Html),
      "BLAST put worm");
  put(blast.status_request("DEMOWORM02"),
      text_ok("QBlastInfoBegin\n\tStatus=READY\n\tThereAreHits=yes\nQBlastInfoEnd\n",
              ContentKind::Text),
      "BLAST status worm");
  put(blast.report_request("DEMOWORM02"),
      json_ok(blast_report(
          "blastn",
          json::array({json{
              {"num", 1},
              {"description",
               json::array({json{{"id", "gi|453232067|ref|NC_003281.10|"},
                                 {"accession", "NC_003281"},
                                 {"title", "Caenorhabditis elegans chromosome II"},
                                 {"sciname", "Caenorhabditis elegans"},
                                 {"taxid", 6239}}})},
              {"len", 15279421},
              {"hsps", json::array({json{{"num", 1},
                                         {"bit_score", 171.0},
                                         {"score", 92},
                                         {"evalue", 1.2e-38},
                                         {"identity", 96},
                                         {"hit_from", 5927},
                                         {"hit_to", 6022},
                                         {"align_len", 96}}})},
          }}))),
      "BLAST report worm");

  std::cout << "demo data written under " << data_dir << " and " << fixture_dir << "\n";
  return 0;
}
