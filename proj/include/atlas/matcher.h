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
#ifndef ATLAS_MATCHER_H_
#define ATLAS_MATCHER_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlas/embedstore.h"
#include "atlas/entry.h"

namespace atlas::matcher {

struct MatchConfig {
  double threshold = 0.75;
  bool headword_check = true;
  bool normalize_headwords = true;

  void validate() const;  // kRangeError unless 0 < threshold <= 1
};

struct MatchRecord {
  EntryId entry_id;
  std::string headword;
  std::optional<CategoryLabel> type;
  // Indexed by edition; the record's own edition is always empty.
  std::array<std::optional<EntryId>, 4> matches;
  std::optional<std::string> qid;

  Edition edition() const { return entry_id.edition; }
  const std::optional<EntryId> &match_in(Edition e) const { return matches[edition_index(e)]; }
  bool operator==(const MatchRecord &) const = default;
};

struct Candidate {
  EntryId id;
  double similarity = 0.0;
};

std::string store_prefix(Edition e);  // "E2_"

// Top-1 entry of target among the store's "<target>_" ids, kept only when
// its similarity reaches the threshold. Throws kUnknownId.
std::optional<Candidate> candidate(const EntryId &entry, Edition target,
                                   const embedstore::Collection &store, const MatchConfig &cfg);

std::string normalize_headword(std::string_view headword, const MatchConfig &cfg);

using EntryIndex = std::map<EntryId, const Entry *>;
EntryIndex index_entries(const std::vector<Entry> &entries);

// Each is the other's candidate and, when enabled, the headwords agree.
bool mutual_match(const EntryId &a, const EntryId &b, const embedstore::Collection &store,
                  const EntryIndex &entries, const MatchConfig &cfg);

struct MatchReport {
  std::vector<std::string> missing_embeddings;
  std::size_t pairs = 0;  // unordered matched pairs
};

// One record per entry, ordered by entry id. Candidate queries run on
// threads worker threads (0 picks the hardware concurrency).
std::vector<MatchRecord> match_corpus(const std::vector<Entry> &entries,
                                      const embedstore::Collection &store, const MatchConfig &cfg,
                                      MatchReport *report = nullptr, unsigned threads = 0);

struct EditionDiff {
  std::size_t added = 0;
  std::size_t removed = 0;
};

// removed: category entries of 'from' without a match in 'to'; added:
// category entries of 'to' without a match in 'from'. Requires from < to.
EditionDiff edition_diff(const std::vector<MatchRecord> &records, Edition from, Edition to,
                         CategoryLabel category);

// TSV with header entry_id, headword, type, edition, E1_match..E4_match, QID;
// absent values are "--".
std::string format_match_table(const std::vector<MatchRecord> &records);
void write_match_table(const std::filesystem::path &path, const std::vector<MatchRecord> &records);
std::vector<MatchRecord> read_match_table(const std::filesystem::path &path);

}  // namespace atlas::matcher

#endif  // ATLAS_MATCHER_H_
