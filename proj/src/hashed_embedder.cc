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
#include "atlas/hashed_embedder.h"

#include <string>

#include "atlas/silver.h"
#include "atlas/text.h"

namespace atlas::embedstore {

std::vector<float> HashedEmbedder::embed(std::string_view input) const {
  std::vector<float> v(dimension_, 0.0f);
  std::string folded = text::fold(text::truncate_chars(text::trim(input), silver::kMaxInputChars));
  // Collapse whitespace so layout differences do not matter.
  std::vector<char32_t> cps = {U' '};
  for (std::size_t pos = 0; pos < folded.size();) {
    char32_t cp = text::next_code_point(folded, pos);
    if (text::is_space(cp)) {
      if (cps.back() != U' ') cps.push_back(U' ');
    } else {
      cps.push_back(cp);
    }
  }
  if (cps.back() != U' ') cps.push_back(U' ');
  if (cps.size() < 3) return v;

  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t k = 0; k < 3; ++k) {
      h ^= static_cast<std::uint64_t>(cps[i + k]);
      h *= 0x100000001b3ULL;
    }
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    float sign = (h >> 63) ? -1.0f : 1.0f;
    v[h % dimension_] += sign;
  }
  return v;
}

}  // namespace atlas::embedstore
