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
#include "atlas/embedstore.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "atlas/common.h"
#include "atlas/io.h"

namespace atlas::embedstore {

namespace fs = std::filesystem;

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  constexpr std::size_t kLanes = 8;
  float lanes[kLanes] = {};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  double sum = 0.0;
  for (float lane : lanes) sum += lane;
  for (; i < n; ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double ab = dot(a, b);
  double aa = dot(a, a);
  double bb = dot(b, b);
  if (aa <= 0.0 || bb <= 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

double cosine(const EmbeddingVector &a, const EmbeddingVector &b) {
  return cosine(a.values, b.values);
}

Collection::Collection(std::string name, std::uint32_t dimension)
    : name_(std::move(name)), dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorCode::kDimensionMismatch, "dimension must be positive");
}

bool Collection::contains(std::string_view id) const {
  return slots_.count(std::string(id)) > 0;
}

std::span<const float> Collection::vector_at(std::size_t slot) const {
  return std::span<const float>(data_).subspan(slot * dimension_, dimension_);
}

std::span<const float> Collection::vector(std::string_view id) const {
  auto it = slots_.find(std::string(id));
  if (it == slots_.end()) throw Error(ErrorCode::kUnknownId, std::string(id));
  return vector_at(it->second);
}

void Collection::insert(EmbeddingVector v) {
  if (v.values.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch,
                v.id + ": " + std::to_string(v.values.size()) + " values, collection dimension " +
                    std::to_string(dimension_));
  }
  for (float x : v.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kFormatError, v.id + ": non-finite component");
  }
  double norm = std::sqrt(dot(v.values, v.values));
  if (norm == 0.0) throw Error(ErrorCode::kZeroVector, v.id);
  // Already-unit vectors are kept verbatim so save/load is bit-exact.
  if (std::abs(norm - 1.0) > 1e-6) {
    for (float &x : v.values) x = static_cast<float>(x / norm);
  }

  auto it = slots_.find(v.id);
  if (it != slots_.end()) {
    spdlog::warn("{}: replacing existing vector {}", name_, v.id);
    std::copy(v.values.begin(), v.values.end(), data_.begin() + it->second * dimension_);
    return;
  }
  slots_.emplace(v.id, ids_.size());
  ids_.push_back(std::move(v.id));
  data_.insert(data_.end(), v.values.begin(), v.values.end());
}

std::vector<Scored> Collection::top_k(std::string_view query_id, std::size_t k,
                                      std::optional<std::string_view> prefix) const {
  return top_k(vector(query_id), k, prefix, query_id);
}

std::vector<Scored> Collection::top_k(std::span<const float> query, std::size_t k,
                                      std::optional<std::string_view> prefix,
                                      std::optional<std::string_view> exclude) const {
  if (query.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch, "query dimension " + std::to_string(query.size()));
  }
  struct Hit {
    double sim;
    std::size_t slot;
  };
  std::vector<Hit> hits;
  for (std::size_t slot = 0; slot < ids_.size(); ++slot) {
    const std::string &id = ids_[slot];
    if (prefix && id.compare(0, prefix->size(), *prefix) != 0) continue;
    if (exclude && id == *exclude) continue;
    hits.push_back({dot(query, vector_at(slot)), slot});
  }
  auto better = [this](const Hit &a, const Hit &b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return ids_[a.slot] < ids_[b.slot];
  };
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
  std::vector<Scored> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({ids_[hits[i].slot], hits[i].sim});
  return out;
}

void Collection::save(const fs::path &path) const {
  EmbeddingFile file;
  file.dimension = dimension_;
  file.vectors.reserve(ids_.size());
  for (std::size_t slot = 0; slot < ids_.size(); ++slot) {
    auto v = vector_at(slot);
    file.vectors.push_back({ids_[slot], std::vector<float>(v.begin(), v.end())});
  }
  write_embedding_file(path, file);
}

Collection Collection::load(const fs::path &path, std::string name) {
  EmbeddingFile file = read_embedding_file(path);
  Collection c(std::move(name), file.dimension);
  for (auto &v : file.vectors) c.insert(std::move(v));
  return c;
}

namespace {

static_assert(sizeof(float) == 4);

template <typename T>
void put_le(std::string &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out += static_cast<char>((value >> (8 * i)) & 0xFF);
  }
}

template <typename T>
T get_le(std::string_view data, std::size_t &pos) {
  if (pos + sizeof(T) > data.size()) throw Error(ErrorCode::kFormatError, "truncated embedding file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return value;
}

EmbeddingFile read_jsonl(const fs::path &path) {
  EmbeddingFile file;
  io::for_each_jsonl(path, [&](const io::json &row, std::size_t line) {
    EmbeddingVector v;
    v.id = io::get_string(row, "id");
    const auto &values = row.at("values");
    if (!values.is_array()) throw Error(ErrorCode::kFormatError, "values must be an array");
    for (const auto &x : values) {
      if (!x.is_number()) throw Error(ErrorCode::kFormatError, "non-numeric value");
      v.values.push_back(x.get<float>());
    }
    if (file.dimension == 0) file.dimension = static_cast<std::uint32_t>(v.values.size());
    if (v.values.size() != file.dimension) {
      throw Error(ErrorCode::kDimensionMismatch, "line " + std::to_string(line));
    }
    file.vectors.push_back(std::move(v));
  });
  if (file.dimension == 0) throw Error(ErrorCode::kFormatError, "empty embedding file");
  return file;
}

}  // namespace

void write_embedding_file(const fs::path &path, const EmbeddingFile &file) {
  std::string out = "ATLE";
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, file.dimension);
  put_le<std::uint64_t>(out, file.vectors.size());
  for (const auto &v : file.vectors) {
    if (v.id.size() > 0xFFFF) throw Error(ErrorCode::kFormatError, "id too long");
    if (v.values.size() != file.dimension) throw Error(ErrorCode::kDimensionMismatch, v.id);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(v.id.size()));
    out += v.id;
    for (float x : v.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
  io::write_file_atomic(path, out);
}

EmbeddingFile read_embedding_file(const fs::path &path) {
  std::string data = io::read_file(path);
  if (data.compare(0, 4, "ATLE") != 0) return read_jsonl(path);

  std::size_t pos = 4;
  auto version = get_le<std::uint32_t>(data, pos);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported embedding file version " + std::to_string(version));
  }
  EmbeddingFile file;
  file.dimension = get_le<std::uint32_t>(data, pos);
  if (file.dimension == 0) throw Error(ErrorCode::kFormatError, "zero dimension");
  auto count = get_le<std::uint64_t>(data, pos);
  const std::size_t record_floor = 2 + 4ULL * file.dimension;
  if (count > (data.size() - pos) / record_floor) {
    throw Error(ErrorCode::kFormatError, "count exceeds file size");
  }
  file.vectors.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    auto len = get_le<std::uint16_t>(data, pos);
    if (pos + len > data.size()) throw Error(ErrorCode::kFormatError, "truncated id");
    EmbeddingVector v;
    v.id = data.substr(pos, len);
    pos += len;
    v.values.resize(file.dimension);
    for (auto &x : v.values) x = std::bit_cast<float>(get_le<std::uint32_t>(data, pos));
    file.vectors.push_back(std::move(v));
  }
  if (pos != data.size()) throw Error(ErrorCode::kFormatError, "trailing bytes in embedding file");
  return file;
}

}  // namespace atlas::embedstore
