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
#ifndef ATLAS_EMBEDSTORE_H_
#define ATLAS_EMBEDSTORE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace atlas::embedstore {

struct EmbeddingVector {
  std::string id;  // "E2_622", "wd:Q215933", ...
  std::vector<float> values;

  bool operator==(const EmbeddingVector &) const = default;
};

struct Scored {
  std::string id;
  double similarity = 0.0;

  bool operator==(const Scored &) const = default;
};

// Dot product with eight float accumulators reduced in double. The
// accumulation order is fixed, so results are reproducible bit for bit.
double dot(std::span<const float> a, std::span<const float> b);

// dot(a, b) / (|a| |b|). Throws kDimensionMismatch or kZeroVector.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(const EmbeddingVector &a, const EmbeddingVector &b);

// Exact in-memory store. Vectors are normalized to unit length on insert,
// so stored similarity is a plain dot product.
class Collection {
 public:
  Collection(std::string name, std::uint32_t dimension);

  const std::string &name() const { return name_; }
  std::uint32_t dimension() const { return dimension_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(std::string_view id) const;
  const std::vector<std::string> &ids() const { return ids_; }
  std::span<const float> vector(std::string_view id) const;  // kUnknownId
  std::span<const float> vector_at(std::size_t slot) const;

  // Throws kDimensionMismatch, kZeroVector, or kFormatError for non-finite
  // components. A repeated id replaces the stored vector.
  void insert(EmbeddingVector v);

  // Brute-force ranking by descending similarity, ties by ascending id, over
  // ids starting with prefix (all ids when absent). The query id itself is
  // excluded. Throws kUnknownId.
  std::vector<Scored> top_k(std::string_view query_id, std::size_t k,
                            std::optional<std::string_view> prefix = std::nullopt) const;
  std::vector<Scored> top_k(std::span<const float> query, std::size_t k,
                            std::optional<std::string_view> prefix = std::nullopt,
                            std::optional<std::string_view> exclude = std::nullopt) const;

  void save(const std::filesystem::path &path) const;
  static Collection load(const std::filesystem::path &path, std::string name = "store");

 private:
  std::string name_;
  std::uint32_t dimension_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> slots_;
};

struct EmbeddingFile {
  std::uint32_t dimension = 0;
  std::vector<EmbeddingVector> vectors;
};

// Binary layout: "ATLE", u32 version, u32 dimension, u64 count, then per
// record u16 id length, id bytes, dimension x f32, all little-endian.
inline constexpr std::uint32_t kFormatVersion = 1;

void write_embedding_file(const std::filesystem::path &path, const EmbeddingFile &file);
// Accepts the binary layout or JSON-lines {id, values}.
EmbeddingFile read_embedding_file(const std::filesystem::path &path);

}  // namespace atlas::embedstore

#endif  // ATLAS_EMBEDSTORE_H_
