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
#ifndef ATLAS_SEGMENTER_H_
#define ATLAS_SEGMENTER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atlas/entry.h"
#include "atlas/ingest.h"
#include "atlas/silver.h"
#include "atlas/tokenizer.h"

namespace atlas::segmenter {

struct TokenMask {
  std::vector<Token> tokens;
  std::vector<std::uint8_t> labels;  // 1 = headword token
  std::uint64_t source_ordinal = 0;

  bool empty() const;  // no positive label
  // [first, last) of the first positive block; {0, 0} when empty.
  std::pair<std::size_t, std::size_t> first_block() const;
};

// Marks the first occurrence of the label's token sequence in the input's
// token window. Case-sensitive. Throws kAlignmentFailed when a present label
// cannot be found.
TokenMask align_mask(const silver::HeadwordSample &sample, const Tokenizer &tok);

// Labels [0, n) positions of tokens where needle's token texts first occur
// contiguously; returns npos when absent.
std::size_t find_token_run(std::span<const Token> haystack, std::span<const Token> needle);

// A word with any positive subword becomes positive in all its subwords.
TokenMask repair_subwords(TokenMask mask);

// Zeroes every positive block after the first.
TokenMask keep_first_block(TokenMask mask);

struct TaggerInput {
  std::string_view raw_text;    // paragraph text, may hold <b> tags
  std::string_view plain_text;  // bold tags removed; token offsets refer to it
  std::span<const Token> tokens;
  std::uint64_t ordinal = 0;
};

class Tagger {
 public:
  enum class Kind { kRuleBaseline, kExternalPredictions };

  virtual ~Tagger() = default;
  virtual std::string name() const = 0;
  virtual Kind kind() const = 0;
  // One label per input token.
  virtual std::vector<std::uint8_t> tag(const TaggerInput &input) const = 0;
};

// Mirrors the bold-tag rule used to build the silver data.
class RuleTagger : public Tagger {
 public:
  std::string name() const override { return "rule"; }
  Kind kind() const override { return Kind::kRuleBaseline; }
  std::vector<std::uint8_t> tag(const TaggerInput &input) const override;
};

// Replays {ordinal, labels} rows aligned to the tokenizer's window.
class ExternalTagger : public Tagger {
 public:
  explicit ExternalTagger(std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> rows);
  static ExternalTagger from_file(const std::filesystem::path &path);

  std::string name() const override { return "external"; }
  Kind kind() const override { return Kind::kExternalPredictions; }
  std::vector<std::uint8_t> tag(const TaggerInput &input) const override;

 private:
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> rows_;
};

TokenMask predict_mask(std::string_view paragraph_text, const Tagger &tagger, const Tokenizer &tok,
                       std::uint64_t ordinal = 0);

// Headword text covered by the first positive block, trailing punctuation
// trimmed. plain_text is the string the mask was tokenized from.
std::string block_text(const TokenMask &mask, std::string_view plain_text);

enum class Policy { kDiscard, kAppend };

struct SegmentReport {
  std::size_t paragraphs = 0;
  std::size_t entries = 0;
  std::size_t discarded = 0;  // headword-less paragraphs dropped
  std::size_t appended = 0;   // headword-less paragraphs merged into the previous entry
  std::size_t stray_blocks = 0;
};

// Paragraphs must be in ordinal order. Entry indices are assigned per
// edition in reading order, starting at 0.
std::vector<Entry> segment(const std::vector<ingest::RawParagraph> &paragraphs, const Tagger &tagger,
                           const Tokenizer &tok, Policy policy, SegmentReport *report = nullptr);

Policy parse_policy(std::string_view s);

void write_masks(const std::filesystem::path &path, const std::vector<TokenMask> &masks);

}  // namespace atlas::segmenter

#endif  // ATLAS_SEGMENTER_H_
