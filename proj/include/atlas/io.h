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
#ifndef ATLAS_IO_H_
#define ATLAS_IO_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace atlas::io {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path &path);

// Writes to a sibling temp file and renames it over the target, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path &path, std::string_view data);

// 64-bit FNV-1a, hex encoded. Used for content hashes and cache keys.
std::string fnv1a_hex(std::string_view data);
std::string file_hash(const std::filesystem::path &path);

// Calls fn for each non-blank line parsed as JSON. Parse failures raise
// kFormatError with the 1-based line number.
void for_each_jsonl(const std::filesystem::path &path,
                    const std::function<void(const json &, std::size_t line)> &fn);

std::string to_jsonl(const std::vector<json> &rows);

// Typed field access with kFormatError on missing or mistyped fields.
std::string get_string(const json &obj, std::string_view key);
std::int64_t get_int(const json &obj, std::string_view key);

}  // namespace atlas::io

#endif  // ATLAS_IO_H_
