// Copyright 2026 The Atlas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>

#include "atlas/io.h"
#include "atlas/linker.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;
using namespace atlas::linker;

namespace {

Endpoints test_endpoints() {
  return {"http://q.test/sparql", "http://wd.test/api.php", "http://wp.test/api.php"};
}

std::string query_url(const Endpoints &e) {
  return e.sparql + "?format=json&query=" + url_encode(std::string(candidate_query()));
}

std::string entities_url(const Endpoints &e, const std::string &ids) {
  return e.wikidata_api +
         "?action=wbgetentities&format=json&props=labels%7Caliases%7Csitelinks&languages=sv&sitefilter=svwiki&ids=" +
         url_encode(ids);
}

std::string extract_url(const Endpoints &e, const std::string &title) {
  return e.wikipedia_api + "?action=query&format=json&prop=extracts&explaintext=1&redirects=1&titles=" +
         url_encode(title);
}

std::shared_ptr<testing::CannedTransport> canned_wikidata(const Endpoints &e) {
  auto t = std::make_shared<testing::CannedTransport>();
  t->set(query_url(e), {200, R"({"results":{"bindings":[
      {"item":{"value":"http://www.wikidata.org/entity/Q1"}},
      {"item":{"value":"http://www.wikidata.org/entity/Q2"}},
      {"item":{"value":"http://www.wikidata.org/entity/Q1"}},
      {"item":{"value":"http://www.wikidata.org/entity/Q3"}}]}})"});
  t->set(entities_url(e, "Q1|Q2|Q3"), {200, R"({"entities":{
      "Q1":{"labels":{"sv":{"value":"Carl Linnaeus"}},"aliases":{"sv":[{"value":"Carl von Linné"}]},
            "sitelinks":{"svwiki":{"title":"Carl von Linné"}}},
      "Q2":{"labels":{"sv":{"value":"Lund"}},"sitelinks":{"svwiki":{"title":"Lund"}}},
      "Q3":{"labels":{"sv":{"value":"Utan artikel"}}}}})"});
  t->set(extract_url(e, "Carl von Linné"),
         {200, R"({"query":{"pages":{"1":{"extract":"Carl von Linné var en svensk naturforskare."}}}})"});
  t->set(extract_url(e, "Lund"), {200, R"({"query":{"pages":{"2":{"extract":"  Lund är en tätort i Skåne.  "}}}})"});
  return t;
}

std::vector<float> at_cos(double c) { return {static_cast<float>(c), static_cast<float>(std::sqrt(1 - c * c))}; }

}  // namespace

TEST_CASE("qid syntax") {
  CHECK(is_qid("Q1"));
  CHECK(is_qid("Q215933"));
  CHECK_FALSE(is_qid("Q"));
  CHECK_FALSE(is_qid("P31"));
  CHECK_FALSE(is_qid("Q12a"));
}

TEST_CASE("cache keys are stable hashes of the url") {
  CHECK(SparqlClient::cache_key("") == "cbf29ce484222325.json");
  CHECK(SparqlClient::cache_key("a") != SparqlClient::cache_key("b"));
}

TEST_CASE("offline miss") {
  testing::TempDir dir;
  SparqlClient client(dir.path(), nullptr, true, std::chrono::milliseconds(0));
  CHECK_THROWS_WITH_AS(client.get("http://q.test/x"), doctest::Contains("EndpointUnavailable"), Error);
  CHECK(client.network_calls() == 0);
}

TEST_CASE("fetch through the transport, then from cache") {
  testing::TempDir dir;
  auto e = test_endpoints();
  auto transport = canned_wikidata(e);
  SparqlClient online(dir.path(), transport, false, std::chrono::milliseconds(0));
  FetchReport report;
  auto candidates = fetch_candidates(online, e, &report);
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].qid == "Q1");
  CHECK(candidates[0].label == "Carl Linnaeus");
  CHECK(candidates[0].aliases == std::vector<std::string>{"Carl von Linné"});
  CHECK(candidates[1].article_prefix == "Lund är en tätort i Skåne.");
  CHECK(report.items == 3);
  CHECK(report.duplicates == 1);
  CHECK(report.without_article == 1);
  CHECK(transport->calls() == 4);

  auto silent = std::make_shared<testing::CannedTransport>();
  SparqlClient offline(dir.path(), silent, true, std::chrono::milliseconds(0));
  CHECK(fetch_candidates(offline, e) == candidates);
  CHECK(silent->calls() == 0);
  CHECK(offline.network_calls() == 0);
}

TEST_CASE("retries and failures") {
  testing::TempDir dir;
  auto t = std::make_shared<testing::CannedTransport>();
  t->set("http://q.test/busy", {503, ""});
  SparqlClient client(dir.path(), t, false, std::chrono::milliseconds(0), 2);
  CHECK_THROWS_WITH_AS(client.get("http://q.test/busy"), doctest::Contains("EndpointUnavailable"), Error);
  CHECK(t->calls_for("http://q.test/busy") == 3);
  CHECK_FALSE(std::filesystem::exists(dir / SparqlClient::cache_key("http://q.test/busy")));
}

TEST_CASE("malformed responses") {
  testing::TempDir dir;
  auto e = test_endpoints();
  auto t = std::make_shared<testing::CannedTransport>();
  t->set(query_url(e), {200, "<html>not json</html>"});
  SparqlClient client(dir.path(), t, false, std::chrono::milliseconds(0));
  CHECK_THROWS_WITH_AS(fetch_candidates(client, e), doctest::Contains("MalformedResponse"), Error);

  testing::TempDir dir2;
  auto t2 = std::make_shared<testing::CannedTransport>();
  t2->set(query_url(e), {200, R"({"results":{"bindings":[{"item":{"value":"http://x/P31"}}]}})"});
  SparqlClient client2(dir2.path(), t2, false, std::chrono::milliseconds(0));
  CHECK_THROWS_WITH_AS(fetch_candidates(client2, e), doctest::Contains("MalformedResponse"), Error);

  testing::TempDir dir3;
  auto t3 = std::make_shared<testing::CannedTransport>();
  t3->set(query_url(e), {200, R"({"head":{}})"});
  SparqlClient client3(dir3.path(), t3, false, std::chrono::milliseconds(0));
  CHECK_THROWS_WITH_AS(fetch_candidates(client3, e), doctest::Contains("MalformedResponse"), Error);
}

TEST_CASE("fixture cache serves the candidate set offline") {
  SparqlClient client(testing::fixtures_dir() / "sparql_cache", nullptr, true, std::chrono::milliseconds(0));
  FetchReport report;
  Endpoints defaults;
  auto candidates = fetch_candidates(client, defaults, &report);
  CHECK(candidates.size() == 6);
  CHECK(report.without_article == 1);
  CHECK(report.duplicates == 1);
}

TEST_CASE("candidate file round trip") {
  testing::TempDir dir;
  std::vector<LinkCandidate> cands{{"Q1", "Lund", "Lund är en stad.", {}}, {"Q2", "Carl Linnaeus", "x", {"Linné"}}};
  write_candidates(dir / "c.jsonl", cands);
  CHECK(read_candidates(dir / "c.jsonl") == cands);

  io::write_file_atomic(dir / "dup.jsonl",
                        "{\"qid\":\"Q1\",\"label\":\"a\",\"article_prefix\":\"x\"}\n"
                        "{\"qid\":\"Q1\",\"label\":\"b\",\"article_prefix\":\"y\"}\n");
  auto dedup = read_candidates(dir / "dup.jsonl");
  REQUIRE(dedup.size() == 1);
  CHECK(dedup[0].label == "a");

  io::write_file_atomic(dir / "bad.jsonl", "{\"qid\":\"X1\",\"label\":\"a\",\"article_prefix\":\"x\"}\n");
  CHECK_THROWS_AS(read_candidates(dir / "bad.jsonl"), Error);
  io::write_file_atomic(dir / "long.jsonl",
                        "{\"qid\":\"Q1\",\"label\":\"a\",\"article_prefix\":\"" + std::string(501, 'x') + "\"}\n");
  CHECK_THROWS_AS(read_candidates(dir / "long.jsonl"), Error);
}

TEST_CASE("label containment") {
  CHECK(label_contains("Carl von Linné", "Linné"));
  CHECK(label_contains("Lund", "LUND"));
  CHECK(label_contains("Lunds universitet", "Lund"));
  CHECK_FALSE(label_contains("Carl Linnaeus", "Linné"));
  CHECK_FALSE(label_contains("Lund", ""));
  CHECK_FALSE(label_contains("Lund", "Lundh"));
}

TEST_CASE("link_entry gates") {
  embedstore::Collection store("s", 2);
  store.insert({"E1_0", {1, 0}});
  store.insert({"E1_1", {0, 1}});
  store.insert({"E1_2", {-1, 0}});
  store.insert({"wd:Q10", at_cos(0.80)});
  store.insert({"wd:Q11", {-0.74f, static_cast<float>(-std::sqrt(1 - 0.74 * 0.74))}});
  std::map<std::string, LinkCandidate> cands{{"Q10", {"Q10", "Carl Linnaeus", "x", {"Linné"}}},
                                             {"Q11", {"Q11", "Lund", "y", {}}}};
  LinkOptions opts;
  CHECK(link_entry(*EntryId::parse("E1_0"), "Carl", store, cands, opts) == "Q10");
  CHECK_FALSE(link_entry(*EntryId::parse("E1_0"), "Linné", store, cands, opts));
  LinkOptions aliases{0.75, true};
  CHECK(link_entry(*EntryId::parse("E1_0"), "Linné", store, cands, aliases) == "Q10");
  // Best candidate below threshold.
  CHECK_FALSE(link_entry(*EntryId::parse("E1_2"), "Lund", store, cands, opts));
  CHECK(link_entry(*EntryId::parse("E1_2"), "Lund", store, cands, LinkOptions{0.7}) == "Q11");
}

TEST_CASE("link_corpus") {
  embedstore::Collection store("s", 2);
  store.insert({"E1_0", {1, 0}});
  store.insert({"E2_0", {1, 0.05f}});
  store.insert({"wd:Q5", {1, 0.01f}});
  std::vector<LinkCandidate> cands{{"Q5", "Lund", "Lund är en stad.", {}}};
  auto rec = [](const std::string &id) {
    matcher::MatchRecord r;
    r.entry_id = *EntryId::parse(id);
    r.headword = "Lund";
    r.qid = "Q999";
    return r;
  };
  LinkReport report;
  auto out = link_corpus({rec("E1_0"), rec("E2_0"), rec("E3_0")}, store, cands, LinkOptions{}, &report);
  CHECK(out[0].qid == "Q5");
  CHECK(out[1].qid == "Q5");
  CHECK_FALSE(out[2].qid);
  CHECK(report.total() == 2);
  CHECK(report.skipped == std::vector<std::string>{"E3_0"});

  auto none = link_corpus({rec("E1_0")}, store, {}, LinkOptions{}, &report);
  CHECK_FALSE(none[0].qid);
  CHECK(report.total() == 0);
}
