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
#ifndef ATLAS_TOKENIZER_H_
#define ATLAS_TOKENIZER_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace atlas {

struct Token {
  std::string text;        // continuation pieces carry the marker prefix
  std::size_t begin = 0;   // byte offsets into the tokenized string
  std::size_t end = 0;
  bool continuation = false;

  bool operator==(const Token &) const = default;
};

class Tokenizer {
 public:
  static constexpr std::size_t kMaxLen = 100;

  virtual ~Tokenizer() = default;

  // Full tokenization, no truncation.
  virtual std::vector<Token> tokenize(std::string_view text) const = 0;
  virtual std::string_view continuation_marker() const = 0;
  virtual std::size_t max_len() const { return kMaxLen; }

  // Tokenization cut to max_len().
  std::vector<Token> tokenize_window(std::string_view text) const;

  // Joins words with single spaces and glues continuation pieces to their
  // word, dropping the marker.
  std::string detokenize(std::span<const Token> tokens) const;
};

// Whitespace and punctuation pre-splitter followed by greedy longest-match
// subword segmentation against a plain-text vocabulary (one piece per line,
// continuation pieces prefixed with "##"). Without a vocabulary every word
// is a single token. Characters no piece covers become single-character
// pieces, so tokenization never loses text.
class WordPieceTokenizer : public Tokenizer {
 public:
  WordPieceTokenizer() = default;
  explicit WordPieceTokenizer(std::vector<std::string> vocabulary);
  static WordPieceTokenizer from_file(const std::filesystem::path &path);

  std::vector<Token> tokenize(std::string_view text) const override;
  std::string_view continuation_marker() const override { return "##"; }
  std::size_t vocabulary_size() const { return vocab_.size(); }

 private:
  void split_word(std::string_view text, std::size_t begin, std::size_t end,
                  std::vector<Token> &out) const;

  std::unordered_set<std::string> vocab_;
  std::size_t longest_piece_ = 0;
};

}  // namespace atlas

#endif  // ATLAS_TOKENIZER_H_
