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
#ifndef ATLAS_LINKER_H_
#define ATLAS_LINKER_H_

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "atlas/embedstore.h"
#include "atlas/http.h"
#include "atlas/matcher.h"

namespace atlas::linker {

struct LinkCandidate {
  std::string qid;    // Q[0-9]+
  std::string label;  // Swedish label
  std::string article_prefix;  // at most 500 characters
  std::vector<std::string> aliases;

  bool operator==(const LinkCandidate &) const = default;
};

bool is_qid(std::string_view s);

// The items that cite the encyclopedia (described by source, P1343).
std::string_view candidate_query();

struct Endpoints {
  std::string sparql = "https://query.wikidata.org/sparql";
  std::string wikidata_api = "https://www.wikidata.org/w/api.php";
  std::string wikipedia_api = "https://sv.wikipedia.org/w/api.php";
};

// Defaults overridden by ATLAS_SPARQL_ENDPOINT, ATLAS_WIKIDATA_API and
// ATLAS_WIKIPEDIA_API.
Endpoints endpoints_from_env();

// GET client with an on-disk cache keyed by the hash of the request URL.
// Cached bodies are returned byte for byte. In offline mode a cache miss is
// kEndpointUnavailable.
class SparqlClient {
 public:
  SparqlClient(std::filesystem::path cache_dir, std::shared_ptr<Transport> transport,
               bool offline, std::chrono::milliseconds delay = std::chrono::milliseconds(1000),
               int max_retries = 3);

  std::string get(const std::string &url);

  static std::string cache_key(const std::string &url);
  const std::filesystem::path &cache_dir() const { return cache_dir_; }
  std::size_t network_calls() const { return network_calls_; }

 private:
  std::filesystem::path cache_dir_;
  std::shared_ptr<Transport> transport_;
  bool offline_;
  RateLimiter limiter_;
  std::chrono::milliseconds delay_;
  int max_retries_;
  std::size_t network_calls_ = 0;
};

struct FetchReport {
  std::size_t items = 0;       // distinct QIDs returned by the query
  std::size_t without_article = 0;
  std::size_t duplicates = 0;
};

// Runs the P1343 query, then resolves labels, Swedish Wikipedia titles and
// article extracts. Results keep query order, deduplicated by QID.
std::vector<LinkCandidate> fetch_candidates(SparqlClient &client, const Endpoints &endpoints,
                                            FetchReport *report = nullptr);

void write_candidates(const std::filesystem::path &path, const std::vector<LinkCandidate> &candidates);
std::vector<LinkCandidate> read_candidates(const std::filesystem::path &path);

inline constexpr std::string_view kStorePrefix = "wd:";

struct LinkOptions {
  double threshold = 0.75;
  bool use_aliases = false;
};

// Case-insensitive containment on NFC-normalized strings.
bool label_contains(std::string_view label, std::string_view headword);

// Top-1 "wd:" vector for the entry; linked when it reaches the threshold and
// its label (or an alias, when enabled) contains the headword.
std::optional<std::string> link_entry(const EntryId &entry, std::string_view headword,
                                      const embedstore::Collection &store,
                                      const std::map<std::string, LinkCandidate> &candidates,
                                      const LinkOptions &options);

struct LinkReport {
  std::array<std::size_t, 4> links{};  // per edition
  std::vector<std::string> skipped;    // entries without an embedding
  std::size_t total() const { return links[0] + links[1] + links[2] + links[3]; }
};

std::vector<matcher::MatchRecord> link_corpus(std::vector<matcher::MatchRecord> records,
                                              const embedstore::Collection &store,
                                              const std::vector<LinkCandidate> &candidates,
                                              const LinkOptions &options,
                                              LinkReport *report = nullptr);

}  // namespace atlas::linker

#endif  // ATLAS_LINKER_H_
