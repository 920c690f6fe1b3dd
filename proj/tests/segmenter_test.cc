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
#include <random>

#include "atlas/io.h"
#include "atlas/segmenter.h"
#include "atlas/text.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;
using namespace atlas::segmenter;

namespace {

WordPieceTokenizer small_vocab() {
  return WordPieceTokenizer({"Gottfried", "Achen", "##wall", "statistiker", "Lund", "uppstad", "i", "Malm",
                             "##ö", "##hus", "län", "Se", "och", "Ber", "##z", "##elius"});
}

ingest::RawParagraph para(std::string text, std::uint64_t ordinal, Edition ed = Edition::E1) {
  ingest::RawParagraph p;
  p.source.edition = ed;
  p.ordinal = ordinal;
  p.text = std::move(text);
  return p;
}

TokenMask mask_of(std::vector<Token> tokens, std::vector<std::uint8_t> labels) {
  TokenMask m;
  m.tokens = std::move(tokens);
  m.labels = std::move(labels);
  return m;
}

Token word(std::string t) { return {std::move(t), 0, 0, false}; }
Token piece(std::string t) { return {"##" + t, 0, 0, true}; }

}  // namespace

TEST_CASE("subword headword aligns to every piece") {
  auto tok = small_vocab();
  silver::HeadwordSample s{"Gottfried Achenwall, statistiker.", std::string("Gottfried Achenwall"), 3,
                           Edition::E1};
  auto m = align_mask(s, tok);
  REQUIRE(m.tokens.size() == 6);
  CHECK(m.tokens[2].text == "##wall");
  CHECK(m.labels == std::vector<std::uint8_t>{1, 1, 1, 0, 0, 0});
  CHECK(m.source_ordinal == 3);
  CHECK(block_text(m, s.input) == "Gottfried Achenwall");
}

TEST_CASE("Lund mask") {
  auto tok = small_vocab();
  silver::HeadwordSample s{"Lund, uppstad i Malmöhus län", std::string("Lund"), 0, Edition::E1};
  auto m = align_mask(s, tok);
  CHECK(m.labels[0] == 1);
  for (std::size_t i = 1; i < m.labels.size(); ++i) CHECK(m.labels[i] == 0);
  CHECK(m.first_block() == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("negatives align to all zeros") {
  auto tok = small_vocab();
  auto m = align_mask({"Se Lund", std::nullopt, 0, Edition::E1}, tok);
  CHECK(m.empty());
  CHECK(m.labels.size() == m.tokens.size());
}

TEST_CASE("missing label fails alignment") {
  auto tok = small_vocab();
  silver::HeadwordSample s{"Lund, uppstad", std::string("Malmö"), 0, Edition::E1};
  CHECK_THROWS_WITH_AS(align_mask(s, tok), doctest::Contains("AlignmentFailed"), Error);
}

TEST_CASE("alignment is case-sensitive and uses the first occurrence") {
  auto tok = small_vocab();
  silver::HeadwordSample s{"Lund och Lund", std::string("Lund"), 0, Edition::E1};
  CHECK(align_mask(s, tok).labels == std::vector<std::uint8_t>{1, 0, 0});
  silver::HeadwordSample lower{"lund och", std::string("Lund"), 0, Edition::E1};
  CHECK_THROWS_AS(align_mask(lower, tok), Error);
}

TEST_CASE("subword repair") {
  std::vector<Token> toks{word("Ber"), piece("z"), piece("elius"), word("och")};
  CHECK(repair_subwords(mask_of(toks, {0, 1, 0, 0})).labels == std::vector<std::uint8_t>{1, 1, 1, 0});
  CHECK(repair_subwords(mask_of(toks, {1, 0, 0, 0})).labels == std::vector<std::uint8_t>{1, 1, 1, 0});
  CHECK(repair_subwords(mask_of(toks, {0, 0, 0, 1})).labels == std::vector<std::uint8_t>{0, 0, 0, 1});
  CHECK(repair_subwords(mask_of(toks, {0, 0, 0, 0})).labels == std::vector<std::uint8_t>{0, 0, 0, 0});
}

TEST_CASE("first block is kept") {
  std::vector<Token> toks{word("a"), word("b"), word("c"), word("d"), word("e")};
  CHECK(keep_first_block(mask_of(toks, {1, 1, 0, 1, 1})).labels == std::vector<std::uint8_t>{1, 1, 0, 0, 0});
  CHECK(keep_first_block(mask_of(toks, {0, 0, 1, 0, 1})).labels == std::vector<std::uint8_t>{0, 0, 1, 0, 0});
}

TEST_CASE("repair and block selection are idempotent on random masks") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    std::size_t n = 1 + rng() % 20;
    std::vector<Token> toks;
    std::vector<std::uint8_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
      toks.push_back(i > 0 && rng() % 3 == 0 ? piece("x") : word("w"));
      labels.push_back(static_cast<std::uint8_t>(rng() % 2));
    }
    auto once = keep_first_block(repair_subwords(mask_of(toks, labels)));
    auto twice = keep_first_block(repair_subwords(once));
    CHECK(once.labels == twice.labels);
    auto [first, last] = once.first_block();
    for (std::size_t i = 0; i < n; ++i) CHECK((once.labels[i] == 1) == (i >= first && i < last));
    // Block boundaries never split a word.
    if (first != last) {
      CHECK_FALSE(toks[first].continuation);
      if (last < n) CHECK_FALSE(toks[last].continuation);
    }
  }
}

TEST_CASE("rule tagger predicts the bold opening") {
  auto tok = small_vocab();
  RuleTagger rule;
  auto m = predict_mask("<b>Gottfried Achenwall</b>, statistiker.", rule, tok, 0);
  CHECK(m.labels == std::vector<std::uint8_t>{1, 1, 1, 0, 0, 0});
  CHECK(predict_mask("Se Lund och Malmöhus.", rule, tok, 0).empty());
}

TEST_CASE("segment with discard and append") {
  auto tok = small_vocab();
  RuleTagger rule;
  std::vector<ingest::RawParagraph> paras{para("<b>Lund</b>, uppstad.", 0), para("Se vidare.", 1),
                                          para("<b>Malmö</b>, stad.", 2), para("Och mer.", 3)};
  SegmentReport report;
  auto discard = segment(paras, rule, tok, Policy::kDiscard, &report);
  REQUIRE(discard.size() == 2);
  CHECK(discard[0].id.str() == "E1_0");
  CHECK(discard[1].id.str() == "E1_1");
  CHECK(discard[0].headword == "Lund");
  CHECK(discard[0].text == "Lund, uppstad.");
  CHECK(report.discarded == 2);

  auto append = segment(paras, rule, tok, Policy::kAppend, &report);
  REQUIRE(append.size() == 2);
  CHECK(append[0].text == "Lund, uppstad.\nSe vidare.");
  CHECK(append[1].text == "Malmö, stad.\nOch mer.");
  CHECK(report.appended == 2);
  CHECK(report.entries == 2);
}

TEST_CASE("entry ids are dense per edition") {
  auto tok = small_vocab();
  RuleTagger rule;
  std::vector<ingest::RawParagraph> paras;
  for (int i = 0; i < 6; ++i) {
    paras.push_back(para("<b>H" + std::to_string(i) + "</b> x", i, i % 2 ? Edition::E2 : Edition::E3));
  }
  auto entries = segment(paras, rule, tok, Policy::kDiscard);
  std::map<Edition, std::uint32_t> next;
  for (const auto &e : entries) CHECK(e.id.index == next[e.edition()]++);
  CHECK(next[Edition::E2] == 3);
}

TEST_CASE("headword-less stream yields no entries") {
  auto tok = small_vocab();
  RuleTagger rule;
  std::vector<ingest::RawParagraph> paras{para("Se Lund.", 0), para("Malmö.", 1)};
  CHECK(segment(paras, rule, tok, Policy::kAppend).empty());
  CHECK(segment({}, rule, tok, Policy::kDiscard).empty());
}

TEST_CASE("external tagger replays labels") {
  auto tok = small_vocab();
  ExternalTagger ext({{0, {1, 0, 0}}, {1, {0, 1, 0}}});
  std::vector<ingest::RawParagraph> paras{para("Lund och Malm", 0), para("Se Lund och", 1)};
  auto entries = segment(paras, ext, tok, Policy::kDiscard);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].headword == "Lund");
  CHECK(entries[1].headword == "Lund");

  std::vector<ingest::RawParagraph> missing{para("Lund och Malm", 7)};
  CHECK_THROWS_WITH_AS(segment(missing, ext, tok, Policy::kDiscard), doctest::Contains("ExternalPredictionMissing"),
                       Error);
  std::vector<ingest::RawParagraph> wrong_len{para("Lund", 0)};
  CHECK_THROWS_WITH_AS(segment(wrong_len, ext, tok, Policy::kDiscard), doctest::Contains("FormatError"), Error);
}

TEST_CASE("policy names") {
  CHECK(parse_policy("discard") == Policy::kDiscard);
  CHECK(parse_policy("append") == Policy::kAppend);
  CHECK_THROWS_AS(parse_policy("merge"), Error);
}

TEST_CASE("windows are capped at 100 tokens") {
  WordPieceTokenizer tok({"a"});
  std::string long_text;
  for (int i = 0; i < 150; ++i) long_text += "a ";
  silver::HeadwordSample s{long_text, std::string("a"), 0, Edition::E1};
  auto m = align_mask(s, tok);
  CHECK(m.tokens.size() == Tokenizer::kMaxLen);
  CHECK(m.labels.size() == Tokenizer::kMaxLen);
}

TEST_CASE("mask file rows") {
  testing::TempDir dir;
  auto tok = small_vocab();
  auto m = align_mask({"Lund i", std::string("Lund"), 5, Edition::E1}, tok);
  write_masks(dir / "m.jsonl", {m});
  auto row = io::json::parse(io::read_file(dir / "m.jsonl"));
  CHECK(row["ordinal"] == 5);
  CHECK(row["labels"] == io::json::array({1, 0}));
  CHECK(row["tokens"] == io::json::array({"Lund", "i"}));
}
