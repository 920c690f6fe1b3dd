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
#include "atlas/linker.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include "atlas/io.h"
#include "atlas/silver.h"
#include "atlas/text.h"

namespace atlas::linker {

namespace fs = std::filesystem;
using io::json;

bool is_qid(std::string_view s) {
  return s.size() >= 2 && s[0] == 'Q' &&
         std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view candidate_query() {
  return "SELECT ?item\n"
         "WHERE {\n"
         "  ?item wdt:P1343 wd:Q678259 .\n"
         "}";
}

Endpoints endpoints_from_env() {
  Endpoints e;
  if (const char *v = std::getenv("ATLAS_SPARQL_ENDPOINT"); v && *v) e.sparql = v;
  if (const char *v = std::getenv("ATLAS_WIKIDATA_API"); v && *v) e.wikidata_api = v;
  if (const char *v = std::getenv("ATLAS_WIKIPEDIA_API"); v && *v) e.wikipedia_api = v;
  return e;
}

SparqlClient::SparqlClient(fs::path cache_dir, std::shared_ptr<Transport> transport, bool offline,
                           std::chrono::milliseconds delay, int max_retries)
    : cache_dir_(std::move(cache_dir)),
      transport_(std::move(transport)),
      offline_(offline),
      limiter_(delay),
      delay_(delay),
      max_retries_(max_retries) {
  if (!offline_ && !transport_) transport_ = std::make_shared<HttpTransport>();
}

std::string SparqlClient::cache_key(const std::string &url) { return io::fnv1a_hex(url) + ".json"; }

std::string SparqlClient::get(const std::string &url) {
  fs::path cached = cache_dir_ / cache_key(url);
  if (fs::exists(cached)) return io::read_file(cached);
  if (offline_) throw Error(ErrorCode::kEndpointUnavailable, "offline and not cached: " + url);

  for (int attempt = 0;; ++attempt) {
    limiter_.wait();
    ++network_calls_;
    HttpResponse res = transport_->get(url);
    if (res.status == 200) {
      io::write_file_atomic(cached, res.body);
      return res.body;
    }
    bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
    if (!retryable || attempt >= max_retries_) {
      throw Error(ErrorCode::kEndpointUnavailable, url + " returned " + std::to_string(res.status));
    }
    spdlog::warn("{} returned {}, retrying", url, res.status);
    std::this_thread::sleep_for(delay_ * (attempt + 1));
  }
}

namespace {

json parse_response(const std::string &body, const std::string &what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kMalformedResponse, what + ": " + e.what());
  }
}

std::string join(const std::vector<std::string> &items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

struct ItemInfo {
  std::string label;
  std::string title;
  std::vector<std::string> aliases;
};

constexpr std::size_t kEntityBatch = 50;

}  // namespace

std::vector<LinkCandidate> fetch_candidates(SparqlClient &client, const Endpoints &endpoints,
                                            FetchReport *report) {
  FetchReport local;
  FetchReport &r = report ? *report : local;
  r = {};

  const std::string query_url =
      endpoints.sparql + "?format=json&query=" + url_encode(std::string(candidate_query()));
  json results = parse_response(client.get(query_url), "SPARQL");
  std::vector<std::string> qids;
  std::set<std::string> seen;
  try {
    for (const auto &binding : results.at("results").at("bindings")) {
      std::string uri = binding.at("item").at("value").get<std::string>();
      std::string qid = uri.substr(uri.rfind('/') + 1);
      if (!is_qid(qid)) throw Error(ErrorCode::kMalformedResponse, "not a QID: " + uri);
      if (!seen.insert(qid).second) {
        ++r.duplicates;
        continue;
      }
      qids.push_back(qid);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("SPARQL results: ") + e.what());
  }
  r.items = qids.size();
  spdlog::info("candidate query returned {} items", qids.size());

  std::map<std::string, ItemInfo> info;
  for (std::size_t begin = 0; begin < qids.size(); begin += kEntityBatch) {
    std::vector<std::string> batch(qids.begin() + begin,
                                   qids.begin() + std::min(qids.size(), begin + kEntityBatch));
    const std::string url = endpoints.wikidata_api +
                            "?action=wbgetentities&format=json&props=labels%7Caliases%7Csitelinks"
                            "&languages=sv&sitefilter=svwiki&ids=" +
                            url_encode(join(batch, "|"));
    json body = parse_response(client.get(url), "wbgetentities");
    try {
      for (const auto &[qid, entity] : body.at("entities").items()) {
        ItemInfo item;
        if (entity.contains("labels") && entity["labels"].contains("sv")) {
          item.label = entity["labels"]["sv"].at("value").get<std::string>();
        }
        if (entity.contains("aliases") && entity["aliases"].contains("sv")) {
          for (const auto &a : entity["aliases"]["sv"]) item.aliases.push_back(a.at("value").get<std::string>());
        }
        if (entity.contains("sitelinks") && entity["sitelinks"].contains("svwiki")) {
          item.title = entity["sitelinks"]["svwiki"].at("title").get<std::string>();
        }
        info[qid] = std::move(item);
      }
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kMalformedResponse, std::string("wbgetentities: ") + e.what());
    }
  }

  std::vector<LinkCandidate> out;
  for (const auto &qid : qids) {
    auto it = info.find(qid);
    if (it == info.end() || it->second.title.empty()) {
      ++r.without_article;
      continue;
    }
    const ItemInfo &item = it->second;
    const std::string url = endpoints.wikipedia_api +
                            "?action=query&format=json&prop=extracts&explaintext=1&redirects=1&titles=" +
                            url_encode(item.title);
    json body = parse_response(client.get(url), "extracts");
    std::string extract;
    try {
      for (const auto &[id, page] : body.at("query").at("pages").items()) {
        if (page.contains("extract")) extract = page["extract"].get<std::string>();
      }
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kMalformedResponse, std::string("extracts: ") + e.what());
    }
    std::string prefix(text::truncate_chars(text::trim(extract), silver::kMaxInputChars));
    if (prefix.empty()) {
      ++r.without_article;
      continue;
    }
    out.push_back({qid, item.label.empty() ? item.title : item.label, std::move(prefix), item.aliases});
  }
  return out;
}

void write_candidates(const fs::path &path, const std::vector<LinkCandidate> &candidates) {
  std::vector<json> rows;
  for (const auto &c : candidates) {
    json j = {{"qid", c.qid}, {"label", c.label}, {"article_prefix", c.article_prefix}};
    if (!c.aliases.empty()) j["aliases"] = c.aliases;
    rows.push_back(std::move(j));
  }
  io::write_file_atomic(path, io::to_jsonl(rows));
}

std::vector<LinkCandidate> read_candidates(const fs::path &path) {
  std::vector<LinkCandidate> out;
  std::set<std::string> seen;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    LinkCandidate c;
    c.qid = io::get_string(row, "qid");
    if (!is_qid(c.qid)) throw Error(ErrorCode::kFormatError, "bad qid '" + c.qid + "'");
    c.label = io::get_string(row, "label");
    c.article_prefix = io::get_string(row, "article_prefix");
    if (text::char_count(c.article_prefix) > silver::kMaxInputChars) {
      throw Error(ErrorCode::kFormatError, c.qid + ": article_prefix longer than 500 characters");
    }
    if (row.contains("aliases")) c.aliases = row["aliases"].get<std::vector<std::string>>();
    if (!seen.insert(c.qid).second) {
      spdlog::warn("{}:{}: duplicate candidate {}", path.string(), line, c.qid);
      return;
    }
    out.push_back(std::move(c));
  });
  return out;
}

bool label_contains(std::string_view label, std::string_view headword) {
  std::string needle = text::fold(headword);
  if (needle.empty()) return false;
  return text::fold(label).find(needle) != std::string::npos;
}

std::optional<std::string> link_entry(const EntryId &entry, std::string_view headword,
                                      const embedstore::Collection &store,
                                      const std::map<std::string, LinkCandidate> &candidates,
                                      const LinkOptions &options) {
  auto hits = store.top_k(entry.str(), 1, kStorePrefix);
  if (hits.empty() || hits[0].similarity < options.threshold) return std::nullopt;
  std::string qid = hits[0].id.substr(kStorePrefix.size());
  auto it = candidates.find(qid);
  if (it == candidates.end()) return std::nullopt;
  const LinkCandidate &c = it->second;
  if (label_contains(c.label, headword)) return qid;
  if (options.use_aliases) {
    for (const auto &alias : c.aliases) {
      if (label_contains(alias, headword)) return qid;
    }
  }
  return std::nullopt;
}

std::vector<matcher::MatchRecord> link_corpus(std::vector<matcher::MatchRecord> records,
                                              const embedstore::Collection &store,
                                              const std::vector<LinkCandidate> &candidates,
                                              const LinkOptions &options, LinkReport *report) {
  LinkReport local;
  LinkReport &r = report ? *report : local;
  r = {};
  std::map<std::string, LinkCandidate> by_qid;
  for (const auto &c : candidates) by_qid.emplace(c.qid, c);

  for (auto &rec : records) {
    rec.qid.reset();
    if (!store.contains(rec.entry_id.str())) {
      r.skipped.push_back(rec.entry_id.str());
      continue;
    }
    rec.qid = link_entry(rec.entry_id, rec.headword, store, by_qid, options);
    if (rec.qid) r.links[edition_index(rec.edition())]++;
  }
  if (!r.skipped.empty()) spdlog::warn("link: {} records have no embedding", r.skipped.size());
  return records;
}

}  // namespace atlas::linker
