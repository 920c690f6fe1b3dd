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
#include "atlas/silver.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_set>

#include "atlas/classifier.h"
#include "atlas/io.h"
#include "atlas/text.h"

namespace atlas::silver {

namespace fs = std::filesystem;
using io::json;

std::optional<HeadwordSample> make_sample(const ingest::RawParagraph &paragraph) {
  std::string_view raw = text::trim(paragraph.text);
  std::string stripped = text::strip_bold(raw);
  std::string input(text::truncate_chars(text::trim(stripped), kMaxInputChars));
  if (input.empty()) return std::nullopt;

  HeadwordSample sample{input, std::nullopt, paragraph.ordinal, paragraph.source.edition};
  if (raw.substr(0, 3) == "<b>") {
    auto close = raw.find("</b>");
    if (close != std::string_view::npos) {
      std::string_view label = text::trim_headword(raw.substr(3, close - 3));
      if (!label.empty() && input.compare(0, label.size(), label) == 0) {
        sample.label = std::string(label);
        return sample;
      }
    }
  }
  if (text::starts_with_upper(input)) return sample;
  return std::nullopt;
}

std::uint64_t bounded_draw(std::mt19937_64 &rng, std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[bounded_draw(rng, i)]);
  }
  return order;
}

DatasetSplit build_headword_dataset(const std::vector<ingest::RawParagraph> &paragraphs,
                                    std::uint64_t seed, std::size_t test_size) {
  if (paragraphs.empty()) throw Error(ErrorCode::kInsufficientData, "no paragraphs");

  DatasetSplit split;
  split.seed = seed;
  std::map<Edition, EditionCounts> counts;
  std::vector<HeadwordSample> samples;
  std::unordered_set<std::string> seen;
  for (const auto &p : paragraphs) {
    auto sample = make_sample(p);
    if (!sample) continue;
    auto &c = counts[sample->edition];
    c.edition = sample->edition;
    (sample->label ? c.positives : c.negatives)++;
    if (!seen.insert(sample->input).second) {
      ++split.duplicates_removed;
      continue;
    }
    samples.push_back(std::move(*sample));
  }
  for (const auto &[edition, c] : counts) split.counts.push_back(c);

  if (test_size >= samples.size()) {
    throw Error(ErrorCode::kInsufficientData,
                "test size " + std::to_string(test_size) + " >= " + std::to_string(samples.size()) +
                    " deduplicated samples");
  }

  auto order = seeded_permutation(samples.size(), seed);
  std::vector<bool> in_test(samples.size(), false);
  for (std::size_t i = 0; i < test_size; ++i) in_test[order[i]] = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(std::move(samples[i]));
  }
  return split;
}

namespace {

json sample_json(const HeadwordSample &s) {
  return {{"edition", edition_name(s.edition)},
          {"input", s.input},
          {"label", s.label ? json(*s.label) : json(nullptr)},
          {"ordinal", s.source_ordinal}};
}

}  // namespace

void write_headword_dataset(const fs::path &dir, const DatasetSplit &split) {
  std::vector<json> train, test;
  for (const auto &s : split.train) train.push_back(sample_json(s));
  for (const auto &s : split.test) test.push_back(sample_json(s));
  io::write_file_atomic(dir / "train.jsonl", io::to_jsonl(train));
  io::write_file_atomic(dir / "test.jsonl", io::to_jsonl(test));

  json rows = json::array();
  std::size_t pos = 0, neg = 0;
  for (const auto &c : split.counts) {
    rows.push_back({{"edition", edition_name(c.edition)},
                    {"positives", c.positives},
                    {"negatives", c.negatives},
                    {"total", c.total()}});
    pos += c.positives;
    neg += c.negatives;
  }
  json summary = {{"editions", rows},
                  {"total", {{"positives", pos}, {"negatives", neg}, {"total", pos + neg}}},
                  {"duplicates_removed", split.duplicates_removed},
                  {"train", split.train.size()},
                  {"test", split.test.size()},
                  {"seed", split.seed}};
  io::write_file_atomic(dir / "counts.json", summary.dump(2) + "\n");
}

std::vector<HeadwordSample> read_samples(const fs::path &path) {
  std::vector<HeadwordSample> out;
  io::for_each_jsonl(path, [&](const json &row, std::size_t) {
    HeadwordSample s;
    s.edition = edition_from_string(io::get_string(row, "edition"));
    s.input = io::get_string(row, "input");
    if (row.contains("label") && !row["label"].is_null()) s.label = io::get_string(row, "label");
    if (row.contains("ordinal")) s.source_ordinal = static_cast<std::uint64_t>(io::get_int(row, "ordinal"));
    out.push_back(std::move(s));
  });
  return out;
}

std::size_t Quota::of(CategoryLabel c) const {
  switch (c) {
    case CategoryLabel::kPerson: return person;
    case CategoryLabel::kLocation: return location;
    case CategoryLabel::kOther: return other;
  }
  return 0;
}

Quota parse_quota(const std::string &spec) {
  std::vector<std::size_t> parts;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception &) {
      throw Error(ErrorCode::kParseError, "bad quota component '" + item + "'");
    }
  }
  if (parts.size() != 3) throw Error(ErrorCode::kParseError, "quota must be p,l,o");
  return {parts[0], parts[1], parts[2]};
}

std::vector<ScaffoldRow> build_category_scaffold(const std::vector<Entry> &entries,
                                                 const NerTagger &ner, const Quota &quota,
                                                 std::uint64_t seed) {
  std::map<CategoryLabel, std::vector<std::size_t>> pools;
  std::vector<CategoryLabel> labels(entries.size(), CategoryLabel::kOther);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      labels[i] = classify_entry(entries[i], ner);
    } catch (const Error &e) {
      spdlog::warn("scaffold: skipping {}: {}", entries[i].id.str(), e.what());
      continue;
    }
    pools[labels[i]].push_back(i);
  }

  std::vector<std::size_t> chosen;
  // Independent streams per category keep one class's pool size from
  // shifting another class's sample.
  for (CategoryLabel c : kAllCategories) {
    const auto &pool = pools[c];
    std::size_t want = quota.of(c);
    if (pool.size() < want) {
      throw Error(ErrorCode::kQuotaUnreachable,
                  std::string(category_name(c)) + ": " + std::to_string(pool.size()) +
                      " candidates for quota " + std::to_string(want));
    }
    auto order = seeded_permutation(pool.size(), seed + static_cast<std::uint64_t>(c));
    for (std::size_t k = 0; k < want; ++k) chosen.push_back(pool[order[k]]);
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<ScaffoldRow> rows;
  rows.reserve(chosen.size());
  for (std::size_t i : chosen) rows.push_back({entries[i], labels[i]});
  return rows;
}

void write_category_file(const fs::path &path, const std::vector<ScaffoldRow> &rows) {
  std::vector<json> out;
  for (const auto &r : rows) {
    out.push_back({{"entry_id", r.entry.id.str()},
                   {"headword", r.entry.headword},
                   {"text_500", std::string(classification_window(r.entry))},
                   {"label", static_cast<int>(r.label)}});
  }
  io::write_file_atomic(path, io::to_jsonl(out));
}

std::vector<ScaffoldRow> read_category_file(const fs::path &path) {
  std::vector<ScaffoldRow> out;
  io::for_each_jsonl(path, [&](const json &row, std::size_t) {
    ScaffoldRow r;
    std::string id = io::get_string(row, "entry_id");
    auto parsed = EntryId::parse(id);
    if (!parsed) throw Error(ErrorCode::kFormatError, "bad entry id '" + id + "'");
    r.entry.id = *parsed;
    r.entry.headword = io::get_string(row, "headword");
    r.entry.text = io::get_string(row, "text_500");
    auto label = category_from_int(io::get_int(row, "label"));
    if (!label) throw Error(ErrorCode::kFormatError, "label out of range for " + id);
    r.label = *label;
    r.entry.category = r.label;
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace atlas::silver
