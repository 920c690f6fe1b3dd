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
#include "atlas/classifier.h"

#include <spdlog/spdlog.h>

#include <fstream>

#include "atlas/io.h"
#include "atlas/segmenter.h"
#include "atlas/silver.h"
#include "atlas/text.h"

namespace atlas {

namespace fs = std::filesystem;
using io::json;

std::string_view ner_tag_name(NerTag t) {
  switch (t) {
    case NerTag::kPRS: return "PRS";
    case NerTag::kLOC: return "LOC";
    case NerTag::kORG: return "ORG";
    case NerTag::kTME: return "TME";
    case NerTag::kEVN: return "EVN";
    case NerTag::kOUT: return "OUT";
  }
  return "OUT";
}

std::optional<NerTag> parse_ner_tag(std::string_view s) {
  for (NerTag t : kAllNerTags) {
    if (ner_tag_name(t) == s) return t;
  }
  // "O" is the usual spelling of outside in BIO-style taggers.
  if (s == "O") return NerTag::kOUT;
  return std::nullopt;
}

CategoryLabel merge_tags(std::span<const NerTag> tags) {
  bool loc = false, prs = false;
  for (NerTag t : tags) {
    loc |= t == NerTag::kLOC;
    prs |= t == NerTag::kPRS;
  }
  if (loc && !prs) return CategoryLabel::kLocation;
  if (prs && !loc) return CategoryLabel::kPerson;
  return CategoryLabel::kOther;
}

std::string_view classification_window(const Entry &entry) {
  return text::truncate_chars(entry.text, silver::kMaxInputChars);
}

ExternalNerTagger::ExternalNerTagger(std::unordered_map<std::string, std::vector<NerTag>> rows)
    : rows_(std::move(rows)) {}

ExternalNerTagger ExternalNerTagger::from_file(const fs::path &path) {
  std::unordered_map<std::string, std::vector<NerTag>> rows;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    std::string id = io::get_string(row, "entry_id");
    const json &tags = row.at("headword_tags");
    if (!tags.is_array()) throw Error(ErrorCode::kFormatError, "headword_tags must be an array");
    std::vector<NerTag> parsed;
    for (const auto &t : tags) {
      auto tag = t.is_string() ? parse_ner_tag(t.get<std::string>()) : std::nullopt;
      if (!tag) {
        throw Error(ErrorCode::kFormatError, "unknown NER tag at line " + std::to_string(line));
      }
      parsed.push_back(*tag);
    }
    rows[id] = std::move(parsed);
  });
  return ExternalNerTagger(std::move(rows));
}

std::vector<NerTag> ExternalNerTagger::headword_tags(const Entry &entry, std::string_view) const {
  auto it = rows_.find(entry.id.str());
  if (it == rows_.end()) {
    throw Error(ErrorCode::kExternalPredictionMissing, "no NER row for " + entry.id.str());
  }
  return it->second;
}

namespace {

std::vector<std::string> read_list(const fs::path &path) {
  std::vector<std::string> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    auto item = text::trim(line);
    if (item.empty() || item[0] == '#') continue;
    out.push_back(text::fold(item));
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

LexiconNerTagger::LexiconNerTagger(Lexicon lexicon, std::shared_ptr<const Tokenizer> tokenizer)
    : lexicon_(std::move(lexicon)), tokenizer_(std::move(tokenizer)) {}

LexiconNerTagger LexiconNerTagger::from_dir(const fs::path &dir,
                                            std::shared_ptr<const Tokenizer> tokenizer) {
  Lexicon lex;
  for (auto &w : read_list(dir / "given_names.txt")) lex.given_names.insert(std::move(w));
  for (auto &w : read_list(dir / "place_names.txt")) lex.place_names.insert(std::move(w));
  lex.place_suffixes = read_list(dir / "place_suffixes.txt");
  lex.person_cues = read_list(dir / "person_cues.txt");
  lex.place_cues = read_list(dir / "place_cues.txt");
  return LexiconNerTagger(std::move(lex), std::move(tokenizer));
}

NerTag LexiconNerTagger::tag_word(const std::string &word) const {
  if (lexicon_.given_names.count(word)) return NerTag::kPRS;
  if (lexicon_.place_names.count(word)) return NerTag::kLOC;
  for (const auto &suffix : lexicon_.place_suffixes) {
    if (ends_with(word, suffix)) return NerTag::kLOC;
  }
  return NerTag::kOUT;
}

std::vector<NerTag> LexiconNerTagger::headword_tags(const Entry &entry,
                                                    std::string_view window) const {
  // Locate the headword tokens in the window with the segmenter's alignment.
  std::vector<Token> tokens;
  std::size_t begin = 0, end = 0;
  std::string_view trimmed = text::trim(window);
  try {
    auto mask = segmenter::align_mask({std::string(trimmed), entry.headword, 0, entry.edition()},
                                      *tokenizer_);
    std::tie(begin, end) = mask.first_block();
    tokens = std::move(mask.tokens);
  } catch (const Error &) {
    tokens = tokenizer_->tokenize(entry.headword);
    begin = 0;
    end = tokens.size();
  }

  // Tag whole words, then spread each word's tag to its pieces.
  std::vector<NerTag> tags;
  bool named = false;
  for (std::size_t i = begin; i < end;) {
    std::size_t j = i + 1;
    while (j < end && tokens[j].continuation) ++j;
    std::string word = tokenizer_->detokenize(std::span<const Token>(tokens).subspan(i, j - i));
    std::size_t pos = 0;
    NerTag t = text::is_alnum(text::next_code_point(word, pos)) ? tag_word(text::fold(word))
                                                                : NerTag::kOUT;
    named |= t != NerTag::kOUT;
    tags.insert(tags.end(), j - i, t);
    i = j;
  }
  if (named || tags.empty()) return tags;

  // No word is in the gazetteers; fall back to the phrase right after the
  // headword.
  std::size_t context_begin = end > 0 && end <= tokens.size() ? tokens[end - 1].end : 0;
  std::string context = text::fold(
      text::truncate_chars(trimmed.substr(std::min(context_begin, trimmed.size())), 80));
  auto has_cue = [&](const std::vector<std::string> &cues) {
    for (const auto &cue : cues) {
      if (context.find(cue) != std::string::npos) return true;
    }
    return false;
  };
  if (has_cue(lexicon_.person_cues)) {
    std::fill(tags.begin(), tags.end(), NerTag::kPRS);
  } else if (has_cue(lexicon_.place_cues)) {
    std::fill(tags.begin(), tags.end(), NerTag::kLOC);
  }
  return tags;
}

CategoryLabel classify_entry(const Entry &entry, const NerTagger &ner) {
  auto tags = ner.headword_tags(entry, classification_window(entry));
  return merge_tags(tags);
}

std::size_t ClassifyReport::total(CategoryLabel c) const {
  std::size_t n = 0;
  for (const auto &row : counts) n += row[static_cast<int>(c)];
  return n;
}

std::vector<Entry> classify_corpus(const std::vector<Entry> &entries, const NerTagger &ner,
                                   ClassifyReport *report) {
  ClassifyReport local;
  ClassifyReport &r = report ? *report : local;
  r = {};
  std::vector<Entry> out = entries;
  for (auto &e : out) {
    try {
      e.category = classify_entry(e, ner);
    } catch (const Error &err) {
      e.category = CategoryLabel::kOther;
      r.skipped.emplace_back(e.id.str(), err.what());
    }
    r.counts[edition_index(e.edition())][static_cast<int>(*e.category)]++;
  }
  if (!r.skipped.empty()) spdlog::warn("classify: {} entries skipped", r.skipped.size());
  return out;
}

void write_ner_predictions(const fs::path &path,
                           const std::vector<std::pair<std::string, std::vector<NerTag>>> &rows) {
  std::vector<json> out;
  for (const auto &[id, tags] : rows) {
    json arr = json::array();
    for (NerTag t : tags) arr.push_back(ner_tag_name(t));
    out.push_back({{"entry_id", id}, {"headword_tags", arr}});
  }
  io::write_file_atomic(path, io::to_jsonl(out));
}

}  // namespace atlas
