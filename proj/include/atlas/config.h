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
#ifndef ATLAS_CONFIG_H_
#define ATLAS_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "atlas/common.h"

namespace atlas::config {

// Bumped whenever a stage's output format or semantics change, so stale
// artifacts are rebuilt.
inline constexpr std::string_view kArtifactVersion = "1";

using Value = std::variant<std::string, std::int64_t, double, bool>;

// Flat TOML subset: [section] headers, key = value lines, '#' comments.
// Values are double-quoted strings, integers, floats or true/false. Keys are
// returned as "section.key" ("key" before the first section).
std::map<std::string, Value> parse_toml(const std::string &source, const std::string &origin = "config");

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path work_dir = "run";

  std::uint64_t seed = 42;
  double threshold = 0.75;
  bool offline = false;

  // ingest
  std::string ingest_mode = "fixture";
  std::filesystem::path fixtures_dir;
  std::filesystem::path page_cache_dir = "cache/pages";
  std::array<std::optional<std::filesystem::path>, 4> manifests;
  std::int64_t delay_ms = 1000;
  std::int64_t concurrency = 4;

  // silver
  std::string silver_editions = "E1,E2";
  std::int64_t test_size = 5000;

  // segment
  std::string tagger = "rule";
  std::optional<std::filesystem::path> tagger_predictions;  // "{edition}" is substituted
  std::string policy = "discard";
  std::optional<std::filesystem::path> vocabulary;

  // classify
  std::string ner = "lexicon";
  std::optional<std::filesystem::path> lexicon_dir;
  std::optional<std::filesystem::path> ner_predictions;

  // store
  std::string embedding = "hashed";
  std::int64_t dimension = 256;
  std::optional<std::filesystem::path> entry_embeddings;
  std::optional<std::filesystem::path> candidate_embeddings;

  // match
  bool headword_check = true;
  bool normalize_headwords = true;

  // link
  bool link_enabled = true;
  std::filesystem::path sparql_cache_dir = "cache/sparql";
  std::optional<std::filesystem::path> candidates_file;
  bool use_aliases = false;

  // eval
  std::optional<std::filesystem::path> judgments;
  std::optional<std::filesystem::path> confusion;

  std::filesystem::path resolve(const std::filesystem::path &p) const;
  std::filesystem::path work(const std::string &name) const { return resolve(work_dir) / name; }
  // Canonical text of all settings, used to detect configuration changes.
  std::string fingerprint() const;
};

// Applies defaults, rejects unknown keys (kUnknownKey), out-of-range values
// (kRangeError) and malformed input (kParseError).
PipelineConfig validate_config(const std::filesystem::path &path);
PipelineConfig validate_config_text(const std::string &source, const std::filesystem::path &base_dir);

}  // namespace atlas::config

#endif  // ATLAS_CONFIG_H_
