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
#ifndef ATLAS_INGEST_H_
#define ATLAS_INGEST_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/common.h"
#include "atlas/http.h"

namespace atlas::ingest {

struct PageRef {
  Edition edition = Edition::E1;
  std::uint32_t volume = 1;
  std::string page_key;     // URL path component following the volume URL
  std::string volume_slug;  // volume URL component; empty means "<edition>-<volume>"

  std::string describe() const;
  bool operator==(const PageRef &) const = default;
};

struct RawParagraph {
  PageRef source;
  std::uint64_t ordinal = 0;
  std::string text;  // may contain balanced <b>/</b>, no other markup

  bool operator==(const RawParagraph &) const = default;
};

enum class Mode { kFixture, kLive };

struct IngestConfig {
  Mode mode = Mode::kFixture;
  std::filesystem::path fixtures_dir;
  std::filesystem::path cache_dir;
  // Live mode base URL; ATLAS_RUNEBERG_URL overrides the default.
  std::string base_url = "https://runeberg.org";
  std::chrono::milliseconds delay{1000};
  int max_retries = 3;
  int concurrency = 4;
  // Delimiters of the OCR text block in Project Runeberg page templates.
  std::string region_start = "<!-- mode=normal -->";
  std::string region_end = "<!-- NEWIMAGE2 -->";
};

IngestConfig default_config();

// Fetches page HTML. Fixture mode reads <fixtures_dir>/<relative path>; live
// mode serves from <cache_dir> when possible and otherwise downloads through
// the transport and writes the cache before returning.
class PageFetcher {
 public:
  PageFetcher(IngestConfig config, std::shared_ptr<Transport> transport);

  std::string fetch(const PageRef &ref);

  static std::filesystem::path relative_path(const PageRef &ref);
  std::string url(const PageRef &ref) const;
  const IngestConfig &config() const { return config_; }

 private:
  IngestConfig config_;
  std::shared_ptr<Transport> transport_;
  RateLimiter limiter_;
};

// Decodes raw page bytes: UTF-8 if valid, otherwise Latin-1. Bytes that look
// binary raise kDecodeError.
std::string decode_page(std::string_view bytes, const std::string &what);

std::string fetch_page(const PageRef &ref, const IngestConfig &config,
                       std::shared_ptr<Transport> transport = nullptr);

// Extracts paragraph strings from the delimited OCR region, keeping only
// <b>/</b> markup.
std::vector<std::string> extract_text(std::string_view html, const IngestConfig &config);
std::vector<std::string> extract_text(std::string_view html);

std::string decode_entities(std::string_view s);

// Drops orphan <b>/</b> tags and empty bold spans.
std::string repair_bold(std::string_view s);

std::vector<RawParagraph> scrape_edition(Edition edition, const std::vector<PageRef> &manifest,
                                         PageFetcher &fetcher, int concurrency = 1);

std::vector<PageRef> read_manifest(const std::filesystem::path &path);
void write_manifest(const std::filesystem::path &path, const std::vector<PageRef> &refs);

void write_paragraphs(const std::filesystem::path &path, const std::vector<RawParagraph> &paragraphs);
std::vector<RawParagraph> read_paragraphs(const std::filesystem::path &path);

}  // namespace atlas::ingest

#endif  // ATLAS_INGEST_H_
