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
#include "atlas/ingest.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <cstdlib>
#include <future>
#include <set>
#include <thread>
#include <tuple>

#include "atlas/io.h"
#include "atlas/text.h"

namespace atlas::ingest {

namespace fs = std::filesystem;
using io::json;

std::string PageRef::describe() const {
  return std::string(edition_name(edition)) + " vol " + std::to_string(volume) + " page " +
         page_key;
}

IngestConfig default_config() {
  IngestConfig config;
  if (const char *url = std::getenv("ATLAS_RUNEBERG_URL"); url && *url) config.base_url = url;
  return config;
}

PageFetcher::PageFetcher(IngestConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      limiter_(config_.delay) {
  if (config_.mode == Mode::kLive && !transport_) {
    transport_ = std::make_shared<HttpTransport>();
  }
}

fs::path PageFetcher::relative_path(const PageRef &ref) {
  return fs::path(std::string(edition_name(ref.edition))) / std::to_string(ref.volume) /
         (ref.page_key + ".html");
}

std::string PageFetcher::url(const PageRef &ref) const {
  std::string slug = ref.volume_slug.empty()
                         ? std::string(edition_name(ref.edition)) + "-" + std::to_string(ref.volume)
                         : ref.volume_slug;
  return config_.base_url + "/" + slug + "/" + ref.page_key + ".html";
}

std::string decode_page(std::string_view bytes, const std::string &what) {
  if (text::is_valid_utf8(bytes)) {
    spdlog::debug("{}: decoded as UTF-8", what);
    return std::string(bytes);
  }
  for (char c : bytes) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x20 && u != '\t' && u != '\n' && u != '\r' && u != '\f') {
      throw Error(ErrorCode::kDecodeError, what + ": binary content");
    }
  }
  spdlog::info("{}: invalid UTF-8, decoded as Latin-1", what);
  return text::latin1_to_utf8(bytes);
}

std::string PageFetcher::fetch(const PageRef &ref) {
  const fs::path rel = relative_path(ref);
  const std::string what = ref.describe();
  if (config_.mode == Mode::kFixture) {
    fs::path path = config_.fixtures_dir / rel;
    if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no fixture for " + what);
    return decode_page(io::read_file(path), what);
  }

  fs::path cached = config_.cache_dir / rel;
  if (!config_.cache_dir.empty() && fs::exists(cached)) {
    return decode_page(io::read_file(cached), what);
  }

  const std::string target = url(ref);
  for (int attempt = 0;; ++attempt) {
    limiter_.wait();
    HttpResponse res = transport_->get(target);
    if (res.status == 200) {
      std::string decoded = decode_page(res.body, what);
      if (!config_.cache_dir.empty()) io::write_file_atomic(cached, res.body);
      return decoded;
    }
    if (res.status == 404 || res.status == 410) {
      throw Error(ErrorCode::kNotFound, target + " returned " + std::to_string(res.status));
    }
    bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
    if (!retryable) {
      throw Error(ErrorCode::kNotFound, target + " returned " + std::to_string(res.status));
    }
    if (attempt >= config_.max_retries) {
      throw Error(ErrorCode::kRateLimited, target + ": retry budget exhausted");
    }
    spdlog::warn("{}: status {}, retrying", target, res.status);
    std::this_thread::sleep_for(config_.delay * (attempt + 1));
  }
}

std::string fetch_page(const PageRef &ref, const IngestConfig &config,
                       std::shared_ptr<Transport> transport) {
  PageFetcher fetcher(config, std::move(transport));
  return fetcher.fetch(ref);
}

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr NamedEntity kEntities[] = {
    {"amp", U'&'},      {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},
    {"apos", U'\''},    {"nbsp", 0xA0},     {"shy", 0xAD},      {"aring", 0xE5},
    {"Aring", 0xC5},    {"auml", 0xE4},     {"Auml", 0xC4},     {"ouml", 0xF6},
    {"Ouml", 0xD6},     {"uuml", 0xFC},     {"Uuml", 0xDC},     {"eacute", 0xE9},
    {"Eacute", 0xC9},   {"egrave", 0xE8},   {"aelig", 0xE6},    {"AElig", 0xC6},
    {"oslash", 0xF8},   {"Oslash", 0xD8},   {"szlig", 0xDF},    {"ndash", 0x2013},
    {"mdash", 0x2014},  {"hellip", 0x2026}, {"laquo", 0xAB},    {"raquo", 0xBB},
    {"deg", 0xB0},      {"sect", 0xA7},     {"middot", 0xB7},   {"frac12", 0xBD},
};

bool is_block_tag(std::string_view name) {
  static const std::set<std::string_view> kBlock = {
      "p", "/p", "br", "br/", "div", "/div", "tr", "/tr", "li", "/li", "h1", "/h1", "h2",
      "/h2", "h3", "/h3", "h4", "/h4", "blockquote", "/blockquote", "table", "/table"};
  return kBlock.count(name) > 0;
}

// Replaces markup in the region: bold tags normalized, block tags become
// newlines, everything else dropped.
std::string strip_tags(std::string_view region) {
  std::string out;
  out.reserve(region.size());
  std::size_t i = 0;
  while (i < region.size()) {
    char c = region[i];
    if (c != '<') {
      out += c;
      ++i;
      continue;
    }
    if (region.compare(i, 4, "<!--") == 0) {
      auto end = region.find("-->", i + 4);
      i = end == std::string_view::npos ? region.size() : end + 3;
      continue;
    }
    auto close = region.find('>', i + 1);
    if (close == std::string_view::npos) {
      // Stray '<' with no closing bracket is text.
      out += c;
      ++i;
      continue;
    }
    std::string_view inner = region.substr(i + 1, close - i - 1);
    std::string name;
    for (char ch : inner) {
      if (ch == ' ' || ch == '\t' || ch == '\n') break;
      name += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '/')) {
      out += c;
      ++i;
      continue;
    }
    if (name == "b") {
      out += "<b>";
    } else if (name == "/b") {
      out += "</b>";
    } else if (is_block_tag(name)) {
      out += '\n';
    }
    i = close + 1;
  }
  return out;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i++];
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (name.size() > 1 && name[0] == '#') {
      bool hex = name[1] == 'x' || name[1] == 'X';
      std::string digits(name.substr(hex ? 2 : 1));
      if (!digits.empty()) {
        char *end = nullptr;
        unsigned long v = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
        if (end && *end == '\0' && v > 0 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) {
          cp = static_cast<char32_t>(v);
        }
      }
    } else {
      for (const auto &e : kEntities) {
        if (e.name == name) cp = e.cp;
      }
    }
    if (!cp) {
      out += s[i++];
      continue;
    }
    text::append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

std::string repair_bold(std::string_view s) {
  // Pair each </b> with the nearest open <b>; anything unpaired is dropped.
  struct Tag {
    std::size_t pos;
    bool open;
  };
  std::vector<Tag> tags;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.compare(i, 3, "<b>") == 0) {
      tags.push_back({i, true});
    } else if (s.compare(i, 4, "</b>") == 0) {
      tags.push_back({i, false});
    }
  }
  std::vector<bool> keep(tags.size(), false);
  std::optional<std::size_t> open;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (tags[t].open) {
      // Nested <b> inside an open span: the inner one is an orphan.
      if (!open) open = t;
    } else if (open) {
      keep[*open] = keep[t] = true;
      open.reset();
    }
  }
  bool repaired = std::find(keep.begin(), keep.end(), false) != keep.end();
  std::string out;
  out.reserve(s.size());
  std::size_t cursor = 0;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    out.append(s.substr(cursor, tags[t].pos - cursor));
    if (keep[t]) out += tags[t].open ? "<b>" : "</b>";
    cursor = tags[t].pos + (tags[t].open ? 3 : 4);
  }
  out.append(s.substr(cursor));
  if (repaired) spdlog::warn("dropped unbalanced bold tag in paragraph: {:.60}", std::string(s));

  // Empty spans carry no headword.
  std::size_t pos;
  while ((pos = out.find("<b></b>")) != std::string::npos) out.erase(pos, 7);
  return out;
}

std::vector<std::string> extract_text(std::string_view html, const IngestConfig &config) {
  auto start = html.find(config.region_start);
  if (start == std::string_view::npos) {
    throw Error(ErrorCode::kRegionNotFound, "start delimiter '" + config.region_start + "' not found");
  }
  start += config.region_start.size();
  auto end = html.find(config.region_end, start);
  if (end == std::string_view::npos) {
    throw Error(ErrorCode::kRegionNotFound, "end delimiter '" + config.region_end + "' not found");
  }
  std::string stripped = strip_tags(html.substr(start, end - start));

  std::vector<std::string> paragraphs;
  std::size_t pos = 0;
  while (pos <= stripped.size()) {
    auto nl = stripped.find_first_of("\r\n", pos);
    if (nl == std::string::npos) nl = stripped.size();
    std::string_view line = std::string_view(stripped).substr(pos, nl - pos);
    std::string para = repair_bold(text::trim(decode_entities(line)));
    para = std::string(text::trim(para));
    if (!text::trim(text::strip_bold(para)).empty()) paragraphs.push_back(std::move(para));
    pos = nl + 1;
  }
  return paragraphs;
}

std::vector<std::string> extract_text(std::string_view html) {
  return extract_text(html, IngestConfig{});
}

std::vector<RawParagraph> scrape_edition(Edition edition, const std::vector<PageRef> &manifest,
                                         PageFetcher &fetcher, int concurrency) {
  if (manifest.empty()) throw Error(ErrorCode::kInvalidManifest, "empty manifest");
  for (const auto &ref : manifest) {
    if (ref.edition != edition) {
      throw Error(ErrorCode::kInvalidManifest,
                  ref.describe() + " does not belong to " + std::string(edition_name(edition)));
    }
  }

  auto load = [&fetcher](const PageRef &ref) {
    try {
      return extract_text(fetcher.fetch(ref), fetcher.config());
    } catch (const Error &e) {
      throw Error(e.code(), ref.describe() + ": " + e.what());
    }
  };

  std::vector<std::vector<std::string>> pages(manifest.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, concurrency));
  for (std::size_t begin = 0; begin < manifest.size(); begin += width) {
    std::size_t end = std::min(manifest.size(), begin + width);
    if (end - begin == 1) {
      pages[begin] = load(manifest[begin]);
      continue;
    }
    std::vector<std::future<std::vector<std::string>>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, load, std::cref(manifest[i])));
    }
    for (std::size_t i = begin; i < end; ++i) pages[i] = batch[i - begin].get();
  }

  std::vector<RawParagraph> out;
  std::uint64_t ordinal = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    for (auto &text : pages[i]) out.push_back({manifest[i], ordinal++, std::move(text)});
  }
  return out;
}

namespace {

json page_ref_json(const PageRef &ref) {
  json j = {{"edition", edition_name(ref.edition)}, {"volume", ref.volume}, {"page_key", ref.page_key}};
  if (!ref.volume_slug.empty()) j["volume_slug"] = ref.volume_slug;
  return j;
}

PageRef page_ref_from_json(const json &j) {
  PageRef ref;
  ref.edition = edition_from_string(io::get_string(j, "edition"));
  auto volume = io::get_int(j, "volume");
  if (volume <= 0) throw Error(ErrorCode::kFormatError, "volume must be positive");
  ref.volume = static_cast<std::uint32_t>(volume);
  ref.page_key = io::get_string(j, "page_key");
  if (ref.page_key.empty()) throw Error(ErrorCode::kFormatError, "empty page_key");
  if (j.contains("volume_slug")) ref.volume_slug = io::get_string(j, "volume_slug");
  return ref;
}

}  // namespace

std::vector<PageRef> read_manifest(const fs::path &path) {
  std::vector<PageRef> refs;
  std::set<std::tuple<Edition, std::uint32_t, std::string>> seen;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    PageRef ref = page_ref_from_json(row);
    if (!seen.emplace(ref.edition, ref.volume, ref.page_key).second) {
      throw Error(ErrorCode::kInvalidManifest,
                  "duplicate page " + ref.describe() + " at line " + std::to_string(line));
    }
    refs.push_back(std::move(ref));
  });
  return refs;
}

void write_manifest(const fs::path &path, const std::vector<PageRef> &refs) {
  std::vector<json> rows;
  for (const auto &ref : refs) rows.push_back(page_ref_json(ref));
  io::write_file_atomic(path, io::to_jsonl(rows));
}

void write_paragraphs(const fs::path &path, const std::vector<RawParagraph> &paragraphs) {
  std::vector<json> rows;
  rows.reserve(paragraphs.size());
  for (const auto &p : paragraphs) {
    json j = page_ref_json(p.source);
    j["ordinal"] = p.ordinal;
    j["text"] = p.text;
    rows.push_back(std::move(j));
  }
  io::write_file_atomic(path, io::to_jsonl(rows));
}

std::vector<RawParagraph> read_paragraphs(const fs::path &path) {
  std::vector<RawParagraph> out;
  io::for_each_jsonl(path, [&](const json &row, std::size_t line) {
    RawParagraph p;
    p.source = page_ref_from_json(row);
    auto ordinal = io::get_int(row, "ordinal");
    if (ordinal < 0 || (!out.empty() && static_cast<std::uint64_t>(ordinal) <= out.back().ordinal)) {
      throw Error(ErrorCode::kFormatError,
                  "ordinals must strictly increase (line " + std::to_string(line) + ")");
    }
    p.ordinal = static_cast<std::uint64_t>(ordinal);
    p.text = io::get_string(row, "text");
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace atlas::ingest
