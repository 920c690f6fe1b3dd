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
#include <algorithm>
#include <random>

#include "atlas/classifier.h"
#include "atlas/io.h"
#include "atlas/text.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;

namespace {

using T = NerTag;

CategoryLabel merge(std::vector<NerTag> tags) { return merge_tags(tags); }

// Independent reading of the merge rule via tag counts.
CategoryLabel merge_oracle(const std::vector<NerTag> &tags) {
  auto loc = std::count(tags.begin(), tags.end(), T::kLOC);
  auto prs = std::count(tags.begin(), tags.end(), T::kPRS);
  if (loc > 0 && prs == 0) return CategoryLabel::kLocation;
  if (prs > 0 && loc == 0) return CategoryLabel::kPerson;
  return CategoryLabel::kOther;
}

Entry entry(const std::string &id, std::string headword, std::string text) {
  return Entry{*EntryId::parse(id), std::move(headword), std::move(text), std::nullopt};
}

std::shared_ptr<const Tokenizer> fixture_tokenizer() {
  return std::make_shared<WordPieceTokenizer>(
      WordPieceTokenizer::from_file(testing::source_dir() / "data/vocab.txt"));
}

}  // namespace

TEST_CASE("merge examples") {
  CHECK(merge({T::kLOC}) == CategoryLabel::kLocation);
  CHECK(merge({T::kPRS, T::kPRS}) == CategoryLabel::kPerson);
  CHECK(merge({T::kLOC, T::kPRS}) == CategoryLabel::kOther);
  CHECK(merge({T::kORG}) == CategoryLabel::kOther);
  CHECK(merge({T::kOUT, T::kLOC, T::kTME}) == CategoryLabel::kLocation);
  CHECK(merge({T::kEVN, T::kPRS}) == CategoryLabel::kPerson);
  CHECK(merge({}) == CategoryLabel::kOther);
}

TEST_CASE("merge agrees with the count oracle on every short sequence") {
  std::size_t cases = 0;
  std::vector<NerTag> seq;
  auto rec = [&](auto &&self, std::size_t depth) -> void {
    CHECK(merge_tags(seq) == merge_oracle(seq));
    ++cases;
    if (depth == 4) return;
    for (NerTag t : kAllNerTags) {
      seq.push_back(t);
      self(self, depth + 1);
      seq.pop_back();
    }
  };
  rec(rec, 0);
  CHECK(cases == 1555);
}

TEST_CASE("merge ignores tag order") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    std::vector<NerTag> tags(1 + rng() % 8);
    for (auto &t : tags) t = kAllNerTags[rng() % kAllNerTags.size()];
    auto expected = merge_tags(tags);
    std::shuffle(tags.begin(), tags.end(), rng);
    CHECK(merge_tags(tags) == expected);
  }
}

TEST_CASE("tag names") {
  for (NerTag t : kAllNerTags) CHECK(parse_ner_tag(ner_tag_name(t)) == t);
  CHECK(parse_ner_tag("O") == T::kOUT);
  CHECK_FALSE(parse_ner_tag("MISC"));
}

TEST_CASE("classification window is the first 500 characters") {
  std::string text = "Lund, stad. " + std::string(600, 'x');
  auto e = entry("E1_0", "Lund", text);
  CHECK(text::char_count(classification_window(e)) == 500);

  // Anything beyond the window cannot change the answer.
  class WindowTagger : public NerTagger {
   public:
    std::string name() const override { return "w"; }
    std::vector<NerTag> headword_tags(const Entry &, std::string_view w) const override {
      return {w.find("PERSON") != std::string_view::npos ? T::kPRS : T::kLOC};
    }
  } tagger;
  auto padded = e;
  padded.text += " PERSON";
  CHECK(classify_entry(e, tagger) == classify_entry(padded, tagger));
  auto inside = entry("E1_0", "Lund", "Lund, PERSON");
  CHECK(classify_entry(inside, tagger) == CategoryLabel::kPerson);
}

TEST_CASE("lexicon tagger on fixture entries") {
  auto ner = LexiconNerTagger::from_dir(testing::source_dir() / "data/lexicon", fixture_tokenizer());
  auto check = [&](std::string head, std::string text, CategoryLabel want) {
    CHECK_MESSAGE(classify_entry(entry("E1_0", head, text), ner) == want, head);
  };
  check("Achenwall", "Achenwall, Gottfried, tysk statistiker, f. 1719 i Elbing.", CategoryLabel::kPerson);
  check("Lund", "Lund, uppstad i Malmöhus län, belägen på en slätt.", CategoryLabel::kLocation);
  check("Norrköping", "Norrköping, Sveriges fjärde stad.", CategoryLabel::kLocation);
  check("Vättern", "Vättern, Sveriges näst största insjö.", CategoryLabel::kLocation);
  check("Göta kanal", "Göta kanal, kanal mellan Vänern och Östersjön.", CategoryLabel::kLocation);
  check("Abborre", "Abborre, Perca fluviatilis, en allmän sötvattensfisk.", CategoryLabel::kOther);
  check("Realism", "Realism, filos., den åsigt, att tingen hafva en verklighet.", CategoryLabel::kOther);
}

TEST_CASE("lexicon tags cover each headword token") {
  auto tok = fixture_tokenizer();
  auto ner = LexiconNerTagger::from_dir(testing::source_dir() / "data/lexicon", tok);
  auto e = entry("E1_0", "Achenwall", "Achenwall, Gottfried, tysk statistiker.");
  CHECK(ner.headword_tags(e, e.text).size() == tok->tokenize("Achenwall").size());
}

TEST_CASE("external NER predictions") {
  testing::TempDir dir;
  write_ner_predictions(dir / "ner.jsonl", {{"E2_0", {T::kPRS, T::kPRS}}, {"E2_1", {T::kLOC, T::kPRS}}});
  auto ner = ExternalNerTagger::from_file(dir / "ner.jsonl");
  CHECK(classify_entry(entry("E2_0", "A B", "A B"), ner) == CategoryLabel::kPerson);
  CHECK(classify_entry(entry("E2_1", "A B", "A B"), ner) == CategoryLabel::kOther);
  CHECK_THROWS_WITH_AS(classify_entry(entry("E2_9", "A", "A"), ner), doctest::Contains("ExternalPredictionMissing"),
                       Error);

  io::write_file_atomic(dir / "bad.jsonl", "{\"entry_id\":\"E1_0\",\"headword_tags\":[\"MISC\"]}\n");
  CHECK_THROWS_WITH_AS(ExternalNerTagger::from_file(dir / "bad.jsonl"), doctest::Contains("FormatError"), Error);
}

TEST_CASE("classify_corpus counts and skips") {
  ExternalNerTagger ner({{"E1_0", {T::kPRS}}, {"E1_1", {T::kLOC}}, {"E3_0", {T::kLOC}}});
  std::vector<Entry> entries{entry("E1_0", "A", "A"), entry("E1_1", "B", "B"), entry("E3_0", "C", "C"),
                             entry("E3_1", "D", "D")};
  ClassifyReport report;
  auto out = classify_corpus(entries, ner, &report);
  REQUIRE(out.size() == 4);
  CHECK(out[0].category == CategoryLabel::kPerson);
  CHECK(out[3].category == CategoryLabel::kOther);
  CHECK(report.count(Edition::E1, CategoryLabel::kLocation) == 1);
  CHECK(report.count(Edition::E3, CategoryLabel::kLocation) == 1);
  CHECK(report.total(CategoryLabel::kOther) == 1);
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].first == "E3_1");

  CHECK(classify_corpus({}, ner, &report).empty());
  CHECK(report.total(CategoryLabel::kPerson) == 0);
}
