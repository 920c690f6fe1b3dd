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
#ifndef ATLAS_ENTRY_H_
#define ATLAS_ENTRY_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/common.h"

namespace atlas {

// Integer coding is part of the file formats: 0 Other, 1 Location, 2 Person.
enum class CategoryLabel : int { kOther = 0, kLocation = 1, kPerson = 2 };

inline constexpr std::array<CategoryLabel, 3> kAllCategories = {
    CategoryLabel::kOther, CategoryLabel::kLocation, CategoryLabel::kPerson};

std::string_view category_name(CategoryLabel c);
std::optional<CategoryLabel> category_from_int(long long v);

struct Entry {
  EntryId id;
  std::string headword;
  std::string text;
  std::optional<CategoryLabel> category;

  Edition edition() const { return id.edition; }
  bool operator==(const Entry &) const = default;
};

// JSON-lines {id, edition, headword, text[, type]}.
void write_entries(const std::filesystem::path &path, const std::vector<Entry> &entries);
std::vector<Entry> read_entries(const std::filesystem::path &path);

}  // namespace atlas

#endif  // ATLAS_ENTRY_H_
