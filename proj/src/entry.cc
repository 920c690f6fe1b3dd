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
#include "atlas/entry.h"

#include <set>

#include "atlas/io.h"

namespace atlas {

using io::json;

std::string_view category_name(CategoryLabel c) {
  switch (c) {
    case CategoryLabel::kOther: return "Other";
    case CategoryLabel::kLocation: return "Location";
    case CategoryLabel::kPerson: return "Person";
  }
  return "?";
}

std::optional<CategoryLabel> category_from_int(long long v) {
  if (v < 0 || v > 2) return std::nullopt;
  return static_cast<CategoryLabel>(v);
}

void write_entries(const std::filesystem::path &path, const std::vector<Entry> &entries) {
  std::vector<json> rows;
  rows.reserve(entries.size());
  for (const auto &e : entries) {
    json j = {{"id", e.id.str()},
              {"edition", edition_name(e.edition())},
              {"headword", e.headword},
              {"text", e.text}};
    if (e.category) j["type"] = static_cast<int>(*e.category);
    rows.push_back(std::move(j));
  }
  io::write_file_atomic(path, io::to_jsonl(rows));
}

std::vector<Entry> read_entries(const std::filesystem::path &path) {
  std::vector<Entry> out;
  std::set<EntryId> seen;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    Entry e;
    std::string id = io::get_string(row, "id");
    auto parsed = EntryId::parse(id);
    if (!parsed) throw Error(ErrorCode::kFormatError, "bad entry id '" + id + "'");
    e.id = *parsed;
    if (row.contains("edition") && edition_from_string(io::get_string(row, "edition")) != e.id.edition) {
      throw Error(ErrorCode::kFormatError, "edition field disagrees with id " + id);
    }
    e.headword = io::get_string(row, "headword");
    if (e.headword.empty()) throw Error(ErrorCode::kFormatError, "empty headword for " + id);
    e.text = io::get_string(row, "text");
    if (row.contains("type") && !row["type"].is_null()) {
      auto c = category_from_int(io::get_int(row, "type"));
      if (!c) throw Error(ErrorCode::kFormatError, "type out of range for " + id);
      e.category = c;
    }
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::kFormatError, "duplicate id " + id + " at line " + std::to_string(line));
    }
    out.push_back(std::move(e));
  });
  return out;
}

}  // namespace atlas
