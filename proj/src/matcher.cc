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
#include "atlas/matcher.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <sstream>
#include <thread>

#include "atlas/io.h"
#include "atlas/text.h"

namespace atlas::matcher {

void MatchConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kRangeError, "threshold must be in (0, 1], got " + std::to_string(threshold));
  }
}

std::string store_prefix(Edition e) { return std::string(edition_name(e)) + "_"; }

std::optional<Candidate> candidate(const EntryId &entry, Edition target,
                                   const embedstore::Collection &store, const MatchConfig &cfg) {
  auto hits = store.top_k(entry.str(), 1, store_prefix(target));
  if (hits.empty() || hits[0].similarity < cfg.threshold) return std::nullopt;
  auto id = EntryId::parse(hits[0].id);
  if (!id) return std::nullopt;
  return Candidate{*id, hits[0].similarity};
}

std::string normalize_headword(std::string_view headword, const MatchConfig &cfg) {
  if (!cfg.normalize_headwords) return std::string(headword);
  return text::fold(text::trim_headword(headword));
}

EntryIndex index_entries(const std::vector<Entry> &entries) {
  EntryIndex index;
  for (const auto &e : entries) index.emplace(e.id, &e);
  return index;
}

namespace {

bool headwords_agree(const Entry &a, const Entry &b, const MatchConfig &cfg) {
  return !cfg.headword_check ||
         normalize_headword(a.headword, cfg) == normalize_headword(b.headword, cfg);
}

}  // namespace

bool mutual_match(const EntryId &a, const EntryId &b, const embedstore::Collection &store,
                  const EntryIndex &entries, const MatchConfig &cfg) {
  if (a.edition == b.edition) return false;
  auto ea = entries.find(a), eb = entries.find(b);
  if (ea == entries.end() || eb == entries.end()) return false;
  if (!store.contains(a.str()) || !store.contains(b.str())) return false;
  auto ab = candidate(a, b.edition, store, cfg);
  if (!ab || ab->id != b) return false;
  auto ba = candidate(b, a.edition, store, cfg);
  if (!ba || ba->id != a) return false;
  return headwords_agree(*ea->second, *eb->second, cfg);
}

std::vector<MatchRecord> match_corpus(const std::vector<Entry> &entries,
                                      const embedstore::Collection &store, const MatchConfig &cfg,
                                      MatchReport *report, unsigned threads) {
  cfg.validate();
  MatchReport local;
  MatchReport &r = report ? *report : local;
  r = {};

  std::vector<const Entry *> sorted;
  for (const auto &e : entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) { return a->id < b->id; });
  const std::size_t n = sorted.size();

  // best[i][t]: candidate of entry i in edition t.
  std::vector<std::array<std::optional<EntryId>, 4>> best(n);
  std::vector<char> embedded(n, 0);
  for (std::size_t i = 0; i < n; ++i) embedded[i] = store.contains(sorted[i]->id.str());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (!embedded[i]) continue;
      for (Edition t : kAllEditions) {
        if (t == sorted[i]->edition()) continue;
        if (auto c = candidate(sorted[i]->id, t, store, cfg)) best[i][edition_index(t)] = c->id;
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto &t : pool) t.join();
  }

  std::map<EntryId, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(sorted[i]->id, i);

  std::vector<MatchRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Entry &e = *sorted[i];
    MatchRecord &rec = records[i];
    rec.entry_id = e.id;
    rec.headword = e.headword;
    rec.type = e.category;
    if (!embedded[i]) {
      r.missing_embeddings.push_back(e.id.str());
      continue;
    }
    for (Edition t : kAllEditions) {
      const auto &c = best[i][edition_index(t)];
      if (!c) continue;
      auto j = position.find(*c);
      if (j == position.end()) continue;
      if (best[j->second][edition_index(e.edition())] != e.id) continue;
      if (!headwords_agree(e, *sorted[j->second], cfg)) continue;
      rec.matches[edition_index(t)] = *c;
      if (e.id < *c) ++r.pairs;
    }
  }
  if (!r.missing_embeddings.empty()) {
    spdlog::warn("match: {} entries have no embedding", r.missing_embeddings.size());
  }
  return records;
}

EditionDiff edition_diff(const std::vector<MatchRecord> &records, Edition from, Edition to,
                         CategoryLabel category) {
  if (!(from < to)) throw Error(ErrorCode::kRangeError, "edition_diff requires from < to");
  EditionDiff diff;
  for (const auto &rec : records) {
    if (rec.type != category) continue;
    if (rec.edition() == from && !rec.match_in(to)) ++diff.removed;
    if (rec.edition() == to && !rec.match_in(from)) ++diff.added;
  }
  return diff;
}

namespace {

constexpr const char *kHeader =
    "entry_id\theadword\ttype\tedition\tE1_match\tE2_match\tE3_match\tE4_match\tQID";

std::string cell(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out.empty() ? "--" : out;
}

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return out;
}

}  // namespace

std::string format_match_table(const std::vector<MatchRecord> &records) {
  std::string out = kHeader;
  out += '\n';
  for (const auto &rec : records) {
    out += rec.entry_id.str();
    out += '\t' + cell(rec.headword);
    out += '\t' + (rec.type ? std::to_string(static_cast<int>(*rec.type)) : std::string("--"));
    out += '\t' + std::string(edition_name(rec.edition()));
    for (Edition e : kAllEditions) {
      const auto &m = rec.match_in(e);
      out += '\t' + (m ? m->str() : std::string("--"));
    }
    out += '\t' + (rec.qid ? cell(*rec.qid) : std::string("--"));
    out += '\n';
  }
  return out;
}

void write_match_table(const std::filesystem::path &path, const std::vector<MatchRecord> &records) {
  io::write_file_atomic(path, format_match_table(records));
}

std::vector<MatchRecord> read_match_table(const std::filesystem::path &path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error(ErrorCode::kFormatError, path.string() + ": missing match table header");
  }
  std::vector<MatchRecord> out;
  std::size_t lineno = 1;
  auto fail = [&](const std::string &what) {
    throw Error(ErrorCode::kFormatError, path.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 9) fail("expected 9 columns");
    MatchRecord rec;
    auto id = EntryId::parse(cols[0]);
    if (!id) fail("bad entry id");
    rec.entry_id = *id;
    rec.headword = cols[1];
    if (cols[2] != "--") {
      auto t = cols[2].size() == 1 ? category_from_int(cols[2][0] - '0') : std::nullopt;
      if (!t) fail("bad type");
      rec.type = t;
    }
    if (cols[3] != edition_name(rec.edition())) fail("edition disagrees with id");
    for (Edition e : kAllEditions) {
      const std::string &c = cols[4 + edition_index(e)];
      if (c == "--") continue;
      auto m = EntryId::parse(c);
      if (!m || m->edition != e || e == rec.edition()) fail("bad match cell '" + c + "'");
      rec.matches[edition_index(e)] = *m;
    }
    if (cols[8] != "--") rec.qid = cols[8];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace atlas::matcher
