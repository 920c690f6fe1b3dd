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
#include "atlas/segmenter.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "atlas/io.h"
#include "atlas/text.h"

namespace atlas::segmenter {

using io::json;

bool TokenMask::empty() const {
  return std::find(labels.begin(), labels.end(), 1) == labels.end();
}

std::pair<std::size_t, std::size_t> TokenMask::first_block() const {
  auto first = std::find(labels.begin(), labels.end(), 1);
  if (first == labels.end()) return {0, 0};
  auto last = std::find(first, labels.end(), 0);
  return {static_cast<std::size_t>(first - labels.begin()),
          static_cast<std::size_t>(last - labels.begin())};
}

std::size_t find_token_run(std::span<const Token> haystack, std::span<const Token> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return std::string::npos;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k) {
      hit = haystack[i + k].text == needle[k].text;
    }
    if (hit) return i;
  }
  return std::string::npos;
}

TokenMask align_mask(const silver::HeadwordSample &sample, const Tokenizer &tok) {
  TokenMask mask;
  mask.source_ordinal = sample.source_ordinal;
  mask.tokens = tok.tokenize_window(sample.input);
  mask.labels.assign(mask.tokens.size(), 0);
  if (!sample.label) return mask;

  std::vector<Token> label_tokens = tok.tokenize(*sample.label);
  std::size_t at = find_token_run(mask.tokens, label_tokens);
  if (at == std::string::npos) {
    throw Error(ErrorCode::kAlignmentFailed,
                "label '" + *sample.label + "' not found in tokens of paragraph " +
                    std::to_string(sample.source_ordinal));
  }
  std::fill_n(mask.labels.begin() + static_cast<std::ptrdiff_t>(at), label_tokens.size(), 1);
  return mask;
}

TokenMask repair_subwords(TokenMask mask) {
  const std::size_t n = mask.labels.size();
  std::size_t word_start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && mask.tokens[i].continuation) continue;
    // [word_start, i) is one word.
    bool any = std::any_of(mask.labels.begin() + word_start, mask.labels.begin() + i,
                           [](auto v) { return v == 1; });
    if (any) std::fill(mask.labels.begin() + word_start, mask.labels.begin() + i, 1);
    word_start = i;
  }
  return mask;
}

TokenMask keep_first_block(TokenMask mask) {
  auto [first, last] = mask.first_block();
  if (first == last) return mask;
  std::fill(mask.labels.begin() + last, mask.labels.end(), 0);
  return mask;
}

std::vector<std::uint8_t> RuleTagger::tag(const TaggerInput &input) const {
  std::vector<std::uint8_t> labels(input.tokens.size(), 0);
  auto sample = silver::make_sample({{}, input.ordinal, std::string(input.raw_text)});
  if (!sample || !sample->label) return labels;
  // make_sample trims leading whitespace; the label starts at the first
  // non-space byte of plain_text.
  const std::size_t offset = text::trim(input.plain_text).data() - input.plain_text.data();
  const std::size_t label_end = offset + sample->label->size();
  for (std::size_t i = 0; i < input.tokens.size(); ++i) {
    if (input.tokens[i].begin < label_end && input.tokens[i].end > offset) labels[i] = 1;
  }
  return labels;
}

ExternalTagger::ExternalTagger(std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> rows)
    : rows_(std::move(rows)) {}

ExternalTagger ExternalTagger::from_file(const std::filesystem::path &path) {
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> rows;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    auto ordinal = io::get_int(row, "ordinal");
    if (ordinal < 0) throw Error(ErrorCode::kFormatError, "negative ordinal");
    const json &labels = row.at("labels");
    if (!labels.is_array()) throw Error(ErrorCode::kFormatError, "labels must be an array");
    std::vector<std::uint8_t> values;
    for (const auto &v : labels) {
      if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
        throw Error(ErrorCode::kFormatError, "labels must be 0/1 at line " + std::to_string(line));
      }
      values.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
    rows[static_cast<std::uint64_t>(ordinal)] = std::move(values);
  });
  return ExternalTagger(std::move(rows));
}

std::vector<std::uint8_t> ExternalTagger::tag(const TaggerInput &input) const {
  auto it = rows_.find(input.ordinal);
  if (it == rows_.end()) {
    throw Error(ErrorCode::kExternalPredictionMissing,
                "no prediction for ordinal " + std::to_string(input.ordinal));
  }
  if (it->second.size() != input.tokens.size()) {
    throw Error(ErrorCode::kFormatError,
                "prediction for ordinal " + std::to_string(input.ordinal) + " has " +
                    std::to_string(it->second.size()) + " labels, tokenizer produced " +
                    std::to_string(input.tokens.size()));
  }
  return it->second;
}

namespace {

TokenMask predict_plain(std::string_view raw, std::string_view plain, const Tagger &tagger,
                        const Tokenizer &tok, std::uint64_t ordinal, std::size_t *stray) {
  TokenMask mask;
  mask.source_ordinal = ordinal;
  mask.tokens = tok.tokenize_window(plain);
  mask.labels = tagger.tag({raw, plain, mask.tokens, ordinal});
  if (mask.labels.size() != mask.tokens.size()) {
    throw Error(ErrorCode::kFormatError, "tagger " + tagger.name() + " returned wrong label count");
  }
  mask = repair_subwords(std::move(mask));
  auto [first, last] = mask.first_block();
  if (std::find(mask.labels.begin() + last, mask.labels.end(), 1) != mask.labels.end()) {
    spdlog::debug("paragraph {}: zeroing stray positive tokens", ordinal);
    if (stray) ++*stray;
    mask = keep_first_block(std::move(mask));
  }
  return mask;
}

}  // namespace

TokenMask predict_mask(std::string_view paragraph_text, const Tagger &tagger, const Tokenizer &tok,
                       std::uint64_t ordinal) {
  std::string plain = text::strip_bold(paragraph_text);
  return predict_plain(paragraph_text, plain, tagger, tok, ordinal, nullptr);
}

std::string block_text(const TokenMask &mask, std::string_view plain_text) {
  auto [first, last] = mask.first_block();
  if (first == last) return {};
  std::size_t begin = mask.tokens[first].begin;
  std::size_t end = mask.tokens[last - 1].end;
  return std::string(text::trim_headword(plain_text.substr(begin, end - begin)));
}

std::vector<Entry> segment(const std::vector<ingest::RawParagraph> &paragraphs, const Tagger &tagger,
                           const Tokenizer &tok, Policy policy, SegmentReport *report) {
  SegmentReport local;
  SegmentReport &r = report ? *report : local;
  r = {};
  std::vector<Entry> entries;
  std::map<Edition, std::uint32_t> next_index;
  // Index of the open entry per edition, for the append policy.
  std::map<Edition, std::size_t> open;

  for (const auto &p : paragraphs) {
    ++r.paragraphs;
    const Edition edition = p.source.edition;
    std::string plain = text::strip_bold(p.text);
    TokenMask mask = predict_plain(p.text, plain, tagger, tok, p.ordinal, &r.stray_blocks);
    std::string headword = block_text(mask, plain);
    std::string body(text::trim(plain));
    if (!headword.empty()) {
      Entry e;
      e.id = {edition, next_index[edition]++};
      e.headword = std::move(headword);
      e.text = std::move(body);
      open[edition] = entries.size();
      entries.push_back(std::move(e));
      ++r.entries;
      continue;
    }
    auto it = open.find(edition);
    if (policy == Policy::kAppend && it != open.end()) {
      entries[it->second].text += "\n" + body;
      ++r.appended;
    } else {
      ++r.discarded;
    }
  }
  return entries;
}

Policy parse_policy(std::string_view s) {
  if (s == "discard") return Policy::kDiscard;
  if (s == "append") return Policy::kAppend;
  throw Error(ErrorCode::kParseError, "unknown segmentation policy '" + std::string(s) + "'");
}

void write_masks(const std::filesystem::path &path, const std::vector<TokenMask> &masks) {
  std::vector<json> rows;
  for (const auto &m : masks) {
    json tokens = json::array();
    for (const auto &t : m.tokens) tokens.push_back(t.text);
    rows.push_back({{"ordinal", m.source_ordinal}, {"tokens", tokens}, {"labels", m.labels}});
  }
  io::write_file_atomic(path, io::to_jsonl(rows));
}

}  // namespace atlas::segmenter
