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
#include "atlas/tokenizer.h"

#include <fstream>

#include "atlas/common.h"
#include "atlas/text.h"

namespace atlas {

std::vector<Token> Tokenizer::tokenize_window(std::string_view text) const {
  std::vector<Token> tokens = tokenize(text);
  if (tokens.size() > max_len()) tokens.resize(max_len());
  return tokens;
}

std::string Tokenizer::detokenize(std::span<const Token> tokens) const {
  const std::string_view marker = continuation_marker();
  std::string out;
  for (const Token &t : tokens) {
    if (t.continuation) {
      std::string_view piece = t.text;
      if (piece.substr(0, marker.size()) == marker) piece.remove_prefix(marker.size());
      out += piece;
    } else {
      if (!out.empty()) out += ' ';
      out += t.text;
    }
  }
  return out;
}

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocabulary) {
  for (auto &piece : vocabulary) {
    if (piece.empty()) continue;
    longest_piece_ = std::max(longest_piece_, piece.size());
    vocab_.insert(std::move(piece));
  }
}

WordPieceTokenizer WordPieceTokenizer::from_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open vocabulary " + path.string());
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    auto piece = text::trim(line);
    if (!piece.empty()) pieces.emplace_back(piece);
  }
  return WordPieceTokenizer(std::move(pieces));
}

void WordPieceTokenizer::split_word(std::string_view text, std::size_t begin, std::size_t end,
                                    std::vector<Token> &out) const {
  if (vocab_.empty()) {
    out.push_back({std::string(text.substr(begin, end - begin)), begin, end, false});
    return;
  }
  std::size_t start = begin;
  while (start < end) {
    const bool cont = start != begin;
    const std::string prefix = cont ? "##" : "";
    // Candidate piece ends, longest first, at code point boundaries.
    std::vector<std::size_t> bounds;
    for (std::size_t pos = start; pos < end;) {
      text::next_code_point(text, pos);
      bounds.push_back(std::min(pos, end));
      if (pos - start > longest_piece_) break;
    }
    std::size_t match = 0;
    for (auto it = bounds.rbegin(); it != bounds.rend(); ++it) {
      if (vocab_.count(prefix + std::string(text.substr(start, *it - start)))) {
        match = *it;
        break;
      }
    }
    if (match == 0) match = bounds.front();
    out.push_back({prefix + std::string(text.substr(start, match - start)), start, match, cont});
    start = match;
  }
}

std::vector<Token> WordPieceTokenizer::tokenize(std::string_view text) const {
  std::vector<Token> out;
  std::size_t pos = 0;
  std::size_t word_begin = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t here = pos;
    char32_t cp = text::next_code_point(text, pos);
    if (text::is_alnum(cp)) {
      if (word_begin == std::string_view::npos) word_begin = here;
      continue;
    }
    if (word_begin != std::string_view::npos) {
      split_word(text, word_begin, here, out);
      word_begin = std::string_view::npos;
    }
    if (text::is_space(cp) || cp == 0xAD) continue;
    out.push_back({std::string(text.substr(here, pos - here)), here, pos, false});
  }
  if (word_begin != std::string_view::npos) split_word(text, word_begin, text.size(), out);
  return out;
}

}  // namespace atlas
