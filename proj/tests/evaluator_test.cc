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

#include "atlas/evaluator.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;
using namespace atlas::evaluator;

namespace {

EntryId eid(const std::string &s) { return *EntryId::parse(s); }

matcher::MatchRecord record(const std::string &id, std::vector<std::string> matches,
                            CategoryLabel type = CategoryLabel::kPerson, std::optional<std::string> qid = {}) {
  matcher::MatchRecord r;
  r.entry_id = eid(id);
  r.headword = "H";
  r.type = type;
  r.qid = std::move(qid);
  for (const auto &m : matches) r.matches[edition_index(eid(m).edition)] = eid(m);
  return r;
}

// All four records of a fully matched group.
std::vector<matcher::MatchRecord> group(std::array<std::string, 4> ids, std::optional<std::string> qid,
                                        CategoryLabel type = CategoryLabel::kPerson) {
  std::vector<matcher::MatchRecord> out;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<std::string> others;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != i) others.push_back(ids[j]);
    }
    out.push_back(record(ids[i], others, type, qid));
  }
  return out;
}

}  // namespace

TEST_CASE("two-class metrics by hand") {
  ConfusionMatrix m{{"0", "1"}, {{5, 1}, {2, 2}}};
  auto r = metrics_from_confusion(m);
  double p0 = 5.0 / 7, r0 = 5.0 / 6, p1 = 2.0 / 3, r1 = 2.0 / 4;
  double f0 = 2 * p0 * r0 / (p0 + r0), f1 = 2 * p1 * r1 / (p1 + r1);
  CHECK(r.accuracy == doctest::Approx(0.7));
  CHECK(r.precision == doctest::Approx((p0 + p1) / 2));
  CHECK(r.recall == doctest::Approx((r0 + r1) / 2));
  CHECK(r.f1 == doctest::Approx((f0 + f1) / 2));
  CHECK(r.averaging == "macro");
}

TEST_CASE("published headword confusion matrix") {
  ConfusionMatrix m{{"0", "1"}, {{486211, 236}, {905, 12648}}};
  auto r = metrics_from_confusion(m);
  CHECK(std::abs(r.accuracy - 0.9977) <= 5e-5);
  CHECK(std::abs(r.precision - 0.9899) <= 5e-5);
  CHECK(std::abs(r.recall - 0.9664) <= 5e-5);
  CHECK(std::abs(r.f1 - 0.9778) <= 5e-5);
}

TEST_CASE("identity matrix scores one") {
  for (std::size_t n : {1u, 2u, 3u, 6u}) {
    ConfusionMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
      m.classes.push_back(std::to_string(i));
      m.counts.push_back(std::vector<std::uint64_t>(n, 0));
      m.counts[i][i] = 3 + i;
    }
    auto r = metrics_from_confusion(m);
    CHECK(r.accuracy == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
  }
}

TEST_CASE("degenerate and invalid matrices") {
  ConfusionMatrix unused{{"a", "b"}, {{4, 0}, {0, 0}}};
  auto r = metrics_from_confusion(unused);
  CHECK(r.per_class[1].degenerate);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK_THROWS_WITH_AS(metrics_from_confusion({{"a"}, {{0}}}), doctest::Contains("EmptyMatrix"), Error);
  CHECK_THROWS_AS(metrics_from_confusion({{"a", "b"}, {{1, 2}}}), Error);
  CHECK_THROWS_AS(metrics_from_confusion({{"a", "b"}, {{1, 2}, {3}}}), Error);
}

TEST_CASE("row normalization") {
  ConfusionMatrix m{{"0", "1", "2"}, {{1, 1, 2}, {0, 5, 0}, {3, 0, 1}}};
  auto rows = row_normalize(m);
  CHECK(rows[0][2] == doctest::Approx(0.5));
  CHECK(rows[1][1] == 1.0);
  for (const auto &row : rows) {
    double sum = 0;
    for (double x : row) sum += x;
    CHECK(sum == doctest::Approx(1.0));
  }
  ConfusionMatrix empty_row{{"0", "1"}, {{1, 1}, {0, 0}}};
  CHECK_THROWS_WITH_AS(row_normalize(empty_row), doctest::Contains("EmptyRow"), Error);
}

TEST_CASE("token confusion") {
  auto m = token_confusion({{1, 0, 0}, {0, 1}}, {{1, 1, 0}, {0, 0}});
  CHECK(m.counts == std::vector<std::vector<std::uint64_t>>{{2, 1}, {1, 1}});
  CHECK_THROWS_AS(token_confusion({{1}}, {{1, 0}}), Error);
  CHECK_THROWS_AS(token_confusion({{1}}, {}), Error);
}

TEST_CASE("confusion file") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "c.json", R"({"classes":["O","L","P"],"counts":[[3,0,0],[0,2,1],[0,0,4]]})");
  auto m = read_confusion(dir / "c.json");
  CHECK(m.classes[2] == "P");
  CHECK(m.total() == 10);
  io::write_file_atomic(dir / "bad.json", "{\"counts\": 3}");
  CHECK_THROWS_WITH_AS(read_confusion(dir / "bad.json"), doctest::Contains("FormatError"), Error);
}

TEST_CASE("quadruples are collected from complete person rows") {
  auto records = group({"E1_1", "E2_1", "E3_1", "E4_1"}, "Q215933");
  auto loc = group({"E1_2", "E2_2", "E3_2", "E4_2"}, std::nullopt, CategoryLabel::kLocation);
  records.insert(records.end(), loc.begin(), loc.end());
  records.push_back(record("E1_5", {"E2_5", "E3_5"}));
  auto q = extract_quadruples(records, CategoryLabel::kPerson);
  CHECK(q.all.size() == 4);
  REQUIRE(q.distinct.size() == 1);
  CHECK(q.distinct[0].canonical() == "E1_1,E2_1,E3_1,E4_1");
  CHECK(q.distinct[0].qid == "Q215933");
  CHECK(extract_quadruples(records, CategoryLabel::kLocation).distinct.size() == 1);
}

TEST_CASE("a qid on any member carries to the distinct quadruple") {
  auto records = group({"E1_0", "E2_0", "E3_0", "E4_0"}, std::nullopt);
  records[2].qid = "Q7";
  auto q = extract_quadruples(records, CategoryLabel::kPerson);
  REQUIRE(q.distinct.size() == 1);
  CHECK(q.distinct[0].qid == "Q7");
}

TEST_CASE("judgments file") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "j.tsv",
                        "canonical_ids\tis_same_person\ttrue_qid\n"
                        "E4_1,E1_1,E3_1,E2_1\t1\tQ215933\n"
                        "E1_2,E2_2,E3_2,E4_2\t0\t--\r\n");
  auto j = read_judgments(dir / "j.tsv");
  REQUIRE(j.size() == 2);
  CHECK(j["E1_1,E2_1,E3_1,E4_1"].same_entity);
  CHECK(j["E1_1,E2_1,E3_1,E4_1"].true_qid == "Q215933");
  CHECK_FALSE(j["E1_2,E2_2,E3_2,E4_2"].same_entity);
  CHECK_FALSE(j["E1_2,E2_2,E3_2,E4_2"].true_qid);

  io::write_file_atomic(dir / "bad.tsv", "E1_1\tmaybe\t--\n");
  CHECK_THROWS_AS(read_judgments(dir / "bad.tsv"), Error);
}

TEST_CASE("published link evaluation counts") {
  LinkCounts c{1498, 267, 514, 486, 101, 94, 80};
  auto r = link_eval(c);
  // Precisions are published to one decimal.
  CHECK(std::round(r.match_precision * 1000) / 10 == doctest::Approx(94.6));
  CHECK(std::round(r.quintuple_precision * 1000) / 10 == doctest::Approx(93.1));
  CHECK(std::abs(r.row(Denominator::kDistinct).precision * 100 - 79.21) <= 0.01);
  CHECK(std::abs(r.row(Denominator::kDistinct).recall * 100 - 15.56) <= 0.01);
  CHECK(std::abs(r.row(Denominator::kDistinct).f1 * 100 - 26.02) <= 0.01);
  CHECK(std::abs(r.row(Denominator::kCorrect).precision * 100 - 85.11) <= 0.01);
  CHECK(std::abs(r.row(Denominator::kCorrect).recall * 100 - 16.46) <= 0.01);
  CHECK(std::abs(r.row(Denominator::kCorrect).f1 * 100 - 27.59) <= 0.01);
  CHECK_FALSE(r.empty);
}

TEST_CASE("link evaluation from judgments") {
  auto records = group({"E1_1", "E2_1", "E3_1", "E4_1"}, "Q1");
  auto second = group({"E1_2", "E2_2", "E3_2", "E4_2"}, "Q9");
  auto third = group({"E1_3", "E2_3", "E3_3", "E4_3"}, std::nullopt);
  records.insert(records.end(), second.begin(), second.end());
  records.insert(records.end(), third.begin(), third.end());
  auto q = extract_quadruples(records, CategoryLabel::kPerson);
  std::map<std::string, Judgment> j{{"E1_1,E2_1,E3_1,E4_1", {true, "Q1"}},
                                    {"E1_2,E2_2,E3_2,E4_2", {true, "Q2"}},
                                    {"E1_3,E2_3,E3_3,E4_3", {false, std::nullopt}}};
  auto r = link_eval(q, j);
  CHECK(r.counts.all == 12);
  CHECK(r.counts.all_with_qid == 8);
  CHECK(r.counts.distinct == 3);
  CHECK(r.counts.correct == 2);
  CHECK(r.counts.quintuples == 2);
  CHECK(r.counts.true_qids == 1);
  CHECK(r.match_precision == doctest::Approx(2.0 / 3));
  CHECK(r.row(Denominator::kDistinct).precision == doctest::Approx(0.5));
  CHECK(r.row(Denominator::kDistinct).recall == doctest::Approx(1.0 / 3));
  CHECK(r.row(Denominator::kCorrect).recall == doctest::Approx(0.5));

  j.erase("E1_3,E2_3,E3_3,E4_3");
  CHECK_THROWS_WITH_AS(link_eval(q, j), doctest::Contains("MissingJudgment"), Error);
}

TEST_CASE("all-correct links score one") {
  auto r = link_eval(LinkCounts{8, 8, 2, 2, 2, 2, 2});
  CHECK(r.match_precision == 1.0);
  CHECK(r.row(Denominator::kCorrect).f1 == 1.0);
}

TEST_CASE("no quintuples is flagged") {
  auto r = link_eval(LinkCounts{4, 0, 1, 1, 0, 0, 0});
  CHECK(r.empty);
  CHECK(r.row(Denominator::kDistinct).f1 == 0.0);
  CHECK(r.match_precision == 1.0);
  CHECK(to_json(r)["empty"] == true);
}

TEST_CASE("corpus statistics") {
  std::vector<Entry> entries{{eid("E1_0"), "A", "", CategoryLabel::kPerson},
                             {eid("E1_1"), "B", "", CategoryLabel::kLocation},
                             {eid("E2_0"), "A", "", CategoryLabel::kPerson}};
  std::vector<matcher::MatchRecord> records{record("E1_0", {"E2_0"}, CategoryLabel::kPerson, "Q1"),
                                            record("E1_1", {}, CategoryLabel::kLocation),
                                            record("E2_0", {"E1_0"}, CategoryLabel::kPerson)};
  auto s = corpus_stats({4, 2, 0, 0}, entries, records);
  CHECK(s.editions[0].extracted == 2);
  CHECK(s.editions[0].discarded == 2);
  CHECK(s.editions[0].extracted_ratio() == 0.5);
  CHECK(s.editions[0].categories[2] == 1);
  CHECK(s.editions[0].links == 1);
  CHECK(s.editions[2].extracted_ratio() == 0.0);
  CHECK(s.diffs.size() == 12);
  auto j = to_json(s);
  CHECK(j["editions"][1]["persons"] == 1);
  CHECK_FALSE(render(s).empty());
}
