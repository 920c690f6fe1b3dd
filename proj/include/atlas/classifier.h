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
#ifndef ATLAS_CLASSIFIER_H_
#define ATLAS_CLASSIFIER_H_

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "atlas/entry.h"
#include "atlas/tokenizer.h"

namespace atlas {

enum class NerTag { kPRS, kLOC, kORG, kTME, kEVN, kOUT };

inline constexpr std::array<NerTag, 6> kAllNerTags = {NerTag::kPRS, NerTag::kLOC, NerTag::kORG,
                                                      NerTag::kTME, NerTag::kEVN, NerTag::kOUT};

std::string_view ner_tag_name(NerTag t);
std::optional<NerTag> parse_ner_tag(std::string_view s);

// Folds the tags covering a headword into one category:
//   LOC without PRS -> Location, PRS without LOC -> Person, anything else
//   (both, or neither) -> Other.
CategoryLabel merge_tags(std::span<const NerTag> tags);

// The first 500 characters of an entry, the only text a tagger may look at.
std::string_view classification_window(const Entry &entry);

class NerTagger {
 public:
  virtual ~NerTagger() = default;
  virtual std::string name() const = 0;
  // One tag per headword token, computed from window (the first 500
  // characters of entry.text).
  virtual std::vector<NerTag> headword_tags(const Entry &entry, std::string_view window) const = 0;
};

// Replays {entry_id, headword_tags} rows produced by an external model.
class ExternalNerTagger : public NerTagger {
 public:
  explicit ExternalNerTagger(std::unordered_map<std::string, std::vector<NerTag>> rows);
  static ExternalNerTagger from_file(const std::filesystem::path &path);

  std::string name() const override { return "external"; }
  std::vector<NerTag> headword_tags(const Entry &entry, std::string_view window) const override;

 private:
  std::unordered_map<std::string, std::vector<NerTag>> rows_;
};

// Gazetteer baseline so the pipeline runs without a model. Word lists are
// plain text files, one case-insensitive item per line:
//   given_names.txt    words tagged PRS
//   place_names.txt    words tagged LOC
//   place_suffixes.txt word endings tagged LOC ("stad", "sjön", ...)
//   person_cues.txt    phrases after the headword that mark a person
//   place_cues.txt     phrases after the headword that mark a place
// Missing files are treated as empty lists.
class LexiconNerTagger : public NerTagger {
 public:
  struct Lexicon {
    std::unordered_set<std::string> given_names;
    std::unordered_set<std::string> place_names;
    std::vector<std::string> place_suffixes;
    std::vector<std::string> person_cues;
    std::vector<std::string> place_cues;
  };

  LexiconNerTagger(Lexicon lexicon, std::shared_ptr<const Tokenizer> tokenizer);
  static LexiconNerTagger from_dir(const std::filesystem::path &dir,
                                   std::shared_ptr<const Tokenizer> tokenizer);

  std::string name() const override { return "lexicon"; }
  std::vector<NerTag> headword_tags(const Entry &entry, std::string_view window) const override;

 private:
  NerTag tag_word(const std::string &folded_word) const;

  Lexicon lexicon_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

CategoryLabel classify_entry(const Entry &entry, const NerTagger &ner);

struct ClassifyReport {
  // counts[edition index][category]
  std::array<std::array<std::size_t, 3>, 4> counts{};
  std::vector<std::pair<std::string, std::string>> skipped;  // entry id, error

  std::size_t count(Edition e, CategoryLabel c) const {
    return counts[edition_index(e)][static_cast<int>(c)];
  }
  std::size_t total(CategoryLabel c) const;
};

// Entries whose tagger fails are labeled Other and listed in the report.
std::vector<Entry> classify_corpus(const std::vector<Entry> &entries, const NerTagger &ner,
                                   ClassifyReport *report = nullptr);

void write_ner_predictions(const std::filesystem::path &path,
                           const std::vector<std::pair<std::string, std::vector<NerTag>>> &rows);

}  // namespace atlas

#endif  // ATLAS_CLASSIFIER_H_
