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
#ifndef ATLAS_SILVER_H_
#define ATLAS_SILVER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "atlas/common.h"
#include "atlas/entry.h"
#include "atlas/ingest.h"

namespace atlas {
class NerTagger;
}

namespace atlas::silver {

inline constexpr std::size_t kMaxInputChars = 500;

struct HeadwordSample {
  std::string input;                 // bold-stripped, at most 500 scalar values
  std::optional<std::string> label;  // headword, absent for negatives
  std::uint64_t source_ordinal = 0;
  Edition edition = Edition::E1;

  bool operator==(const HeadwordSample &) const = default;
};

// Positive when the paragraph opens with a bold span, negative when it opens
// with an uppercase letter, otherwise nothing.
std::optional<HeadwordSample> make_sample(const ingest::RawParagraph &paragraph);

struct EditionCounts {
  Edition edition = Edition::E1;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t total() const { return positives + negatives; }
};

struct DatasetSplit {
  std::vector<HeadwordSample> train;
  std::vector<HeadwordSample> test;
  std::uint64_t seed = 0;
  std::vector<EditionCounts> counts;  // per edition, before deduplication
  std::size_t duplicates_removed = 0;
};

DatasetSplit build_headword_dataset(const std::vector<ingest::RawParagraph> &paragraphs,
                                    std::uint64_t seed, std::size_t test_size);

// Writes train.jsonl, test.jsonl and counts.json into dir.
void write_headword_dataset(const std::filesystem::path &dir, const DatasetSplit &split);
std::vector<HeadwordSample> read_samples(const std::filesystem::path &path);

// Uniform integer in [0, bound) from a 64-bit Mersenne Twister. Unlike the
// standard distributions its output is identical across standard libraries.
std::uint64_t bounded_draw(std::mt19937_64 &rng, std::uint64_t bound);
// Fisher-Yates over [0, n).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct Quota {
  std::size_t person = 0;
  std::size_t location = 0;
  std::size_t other = 0;

  std::size_t of(CategoryLabel c) const;
};

Quota parse_quota(const std::string &spec);  // "p,l,o"

struct ScaffoldRow {
  Entry entry;
  CategoryLabel label = CategoryLabel::kOther;
};

// NER-derived labels for a balanced subset, prior to manual verification.
std::vector<ScaffoldRow> build_category_scaffold(const std::vector<Entry> &entries,
                                                 const NerTagger &ner, const Quota &quota,
                                                 std::uint64_t seed);

// JSON-lines {entry_id, headword, text_500, label}.
void write_category_file(const std::filesystem::path &path, const std::vector<ScaffoldRow> &rows);
std::vector<ScaffoldRow> read_category_file(const std::filesystem::path &path);

}  // namespace atlas::silver

#endif  // ATLAS_SILVER_H_
