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
#ifndef ATLAS_HASHED_EMBEDDER_H_
#define ATLAS_HASHED_EMBEDDER_H_

#include <cstdint>
#include <string_view>
#include <vector>

namespace atlas::embedstore {

// Signed feature hashing of case-folded character trigrams over the first
// 500 characters. A model-free stand-in for a sentence encoder: texts that
// share most of their wording land close together, unrelated texts near 0.
class HashedEmbedder {
 public:
  explicit HashedEmbedder(std::uint32_t dimension = 256) : dimension_(dimension) {}

  std::uint32_t dimension() const { return dimension_; }
  // All-zero when the text is empty.
  std::vector<float> embed(std::string_view text) const;

 private:
  std::uint32_t dimension_;
};

}  // namespace atlas::embedstore

#endif  // ATLAS_HASHED_EMBEDDER_H_
