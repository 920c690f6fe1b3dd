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
#ifndef ATLAS_EVALUATOR_H_
#define ATLAS_EVALUATOR_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlas/entry.h"
#include "atlas/io.h"
#include "atlas/matcher.h"

namespace atlas::evaluator {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
  void validate() const;  // square and consistent with classes
};

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and was taken as 0
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // mean of per-class F1
  std::string averaging = "macro";
  std::vector<ClassMetrics> per_class;
};

MetricsReport metrics_from_confusion(const ConfusionMatrix &m);
std::vector<std::vector<double>> row_normalize(const ConfusionMatrix &m);

// Binary token-level matrix (classes "0", "1") from aligned label sequences.
ConfusionMatrix token_confusion(const std::vector<std::vector<std::uint8_t>> &gold,
                                const std::vector<std::vector<std::uint8_t>> &predicted);

// JSON {"classes": [...], "counts": [[...], ...]}.
ConfusionMatrix read_confusion(const std::filesystem::path &path);

struct Quadruple {
  std::array<EntryId, 4> members;  // indexed by edition
  std::optional<std::string> qid;

  // Sorted member ids joined by commas; the identity of a quadruple.
  std::string canonical() const;
};

struct Quadruples {
  std::vector<Quadruple> all;
  std::vector<Quadruple> distinct;
};

// One quadruple per record of the category with a match in every other
// edition. Distinct quadruples keep the first QID seen for their set.
Quadruples extract_quadruples(const std::vector<matcher::MatchRecord> &records, CategoryLabel category);

struct Judgment {
  bool same_entity = false;
  std::optional<std::string> true_qid;
};

// TSV: canonical_ids, is_same_person, true_qid|--. A header line starting
// with "canonical_ids" is skipped.
std::map<std::string, Judgment> read_judgments(const std::filesystem::path &path);

struct LinkCounts {
  std::size_t all = 0;            // quadruples, duplicates included
  std::size_t all_with_qid = 0;
  std::size_t distinct = 0;
  std::size_t correct = 0;        // distinct quadruples judged the same entity
  std::size_t quintuples = 0;     // distinct quadruples carrying a QID
  std::size_t correct_quintuples = 0;
  std::size_t true_qids = 0;      // quintuples whose QID is the judged one
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class Denominator { kDistinct, kCorrect };

struct LinkEvaluation {
  LinkCounts counts;
  double match_precision = 0.0;      // correct / distinct
  double quintuple_precision = 0.0;  // correct quintuples / quintuples
  Prf over_distinct;  // true QIDs against quintuples and all distinct quadruples
  Prf over_correct;   // true QIDs against correct quintuples and correct quadruples
  bool empty = false; // no quintuples: link metrics are reported as 0

  const Prf &row(Denominator d) const { return d == Denominator::kDistinct ? over_distinct : over_correct; }
};

LinkEvaluation link_eval(const LinkCounts &counts);
// Throws kMissingJudgment when a distinct quadruple has no judgment.
LinkEvaluation link_eval(const Quadruples &quads, const std::map<std::string, Judgment> &judgments);

struct EditionStats {
  std::size_t scraped = 0;
  std::size_t extracted = 0;
  std::size_t discarded = 0;
  std::array<std::size_t, 3> categories{};  // by CategoryLabel value
  std::size_t links = 0;

  double extracted_ratio() const { return scraped ? double(extracted) / scraped : 0.0; }
  double discarded_ratio() const { return scraped ? double(discarded) / scraped : 0.0; }
};

struct DiffRow {
  Edition from;
  Edition to;
  CategoryLabel category;
  matcher::EditionDiff diff;
};

struct CorpusStats {
  std::array<EditionStats, 4> editions{};
  std::vector<DiffRow> diffs;
};

// scraped[e] is the paragraph count of edition e; absent editions count 0.
CorpusStats corpus_stats(const std::array<std::size_t, 4> &scraped, const std::vector<Entry> &entries,
                         const std::vector<matcher::MatchRecord> &records);

io::json to_json(const MetricsReport &r);
io::json to_json(const LinkEvaluation &r);
io::json to_json(const CorpusStats &s);
std::string render(const ConfusionMatrix &m, const MetricsReport &r);
std::string render(const LinkEvaluation &r);
std::string render(const CorpusStats &s);

}  // namespace atlas::evaluator

#endif  // ATLAS_EVALUATOR_H_
