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
#ifndef ATLAS_TEXT_H_
#define ATLAS_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace atlas::text {

bool is_valid_utf8(std::string_view s);
std::string latin1_to_utf8(std::string_view s);

// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t char_count(std::string_view s);

// Longest prefix holding at most max_chars scalar values. Never splits a
// code point.
std::string_view truncate_chars(std::string_view s, std::size_t max_chars);

// Decodes the code point starting at s[pos] and advances pos. Invalid bytes
// decode as U+FFFD and advance by one.
char32_t next_code_point(std::string_view s, std::size_t &pos);
void append_utf8(std::string &out, char32_t cp);

bool is_upper(char32_t cp);
bool is_alnum(char32_t cp);
bool is_space(char32_t cp);
bool is_punct(char32_t cp);

// True if the first scalar value is an uppercase letter (Unicode-aware, so
// Å/Ä/Ö count).
bool starts_with_upper(std::string_view s);

std::string nfc(std::string_view s);
// NFC followed by full Unicode case folding.
std::string fold(std::string_view s);

std::string_view trim(std::string_view s);
// Strips surrounding whitespace plus trailing ',', ';' and '.'.
std::string_view trim_headword(std::string_view s);

// Removes literal <b> and </b> tags.
std::string strip_bold(std::string_view s);

}  // namespace atlas::text

#endif  // ATLAS_TEXT_H_
