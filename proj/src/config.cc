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
#include "atlas/config.h"

#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "atlas/io.h"
#include "atlas/text.h"

namespace atlas::config {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_error(const std::string &origin, std::size_t line, const std::string &what) {
  throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ": " + what);
}

bool is_bare_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

Value parse_value(std::string_view v, const std::string &origin, std::size_t line) {
  if (v.empty()) parse_error(origin, line, "missing value");
  if (v.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size() && v[i] != '"'; ++i) {
      if (v[i] == '\\' && i + 1 < v.size()) {
        char e = v[++i];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: parse_error(origin, line, "unsupported escape");
        }
      } else {
        out += v[i];
      }
    }
    if (i >= v.size()) parse_error(origin, line, "unterminated string");
    if (!text::trim(v.substr(i + 1)).empty()) parse_error(origin, line, "trailing characters after string");
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ec == std::errc() && p == v.data() + v.size()) return i;
  double d = 0;
  auto [pd, ecd] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ecd == std::errc() && pd == v.data() + v.size()) return d;
  parse_error(origin, line, "cannot parse value '" + std::string(v) + "'");
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::map<std::string, Value> parse_toml(const std::string &source, const std::string &origin) {
  std::map<std::string, Value> out;
  std::istringstream in(source);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = text::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(origin, lineno, "unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (!is_bare_key(section)) parse_error(origin, lineno, "bad section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(origin, lineno, "expected key = value");
    std::string key(text::trim(line.substr(0, eq)));
    if (!is_bare_key(key)) parse_error(origin, lineno, "bad key '" + key + "'");
    std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) parse_error(origin, lineno, "duplicate key '" + full + "'");
    out[full] = parse_value(text::trim(line.substr(eq + 1)), origin, lineno);
  }
  return out;
}

fs::path PipelineConfig::resolve(const fs::path &p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::string PipelineConfig::fingerprint() const {
  std::ostringstream s;
  auto opt = [](const std::optional<fs::path> &p) { return p ? p->string() : std::string("-"); };
  s << "format=" << kArtifactVersion << ";work_dir=" << work_dir << ";seed=" << seed << ";threshold=" << threshold << ";offline=" << offline
    << ";ingest_mode=" << ingest_mode << ";fixtures=" << fixtures_dir << ";page_cache=" << page_cache_dir;
  for (std::size_t i = 0; i < manifests.size(); ++i) s << ";manifest" << i << "=" << opt(manifests[i]);
  s << ";delay_ms=" << delay_ms << ";concurrency=" << concurrency << ";silver_editions=" << silver_editions
    << ";test_size=" << test_size << ";tagger=" << tagger << ";tagger_predictions=" << opt(tagger_predictions)
    << ";policy=" << policy << ";vocabulary=" << opt(vocabulary) << ";ner=" << ner
    << ";lexicon=" << opt(lexicon_dir) << ";ner_predictions=" << opt(ner_predictions)
    << ";embedding=" << embedding << ";dimension=" << dimension
    << ";entry_embeddings=" << opt(entry_embeddings) << ";candidate_embeddings=" << opt(candidate_embeddings)
    << ";headword_check=" << headword_check << ";normalize_headwords=" << normalize_headwords
    << ";link=" << link_enabled << ";sparql_cache=" << sparql_cache_dir
    << ";candidates=" << opt(candidates_file) << ";aliases=" << use_aliases
    << ";judgments=" << opt(judgments) << ";confusion=" << opt(confusion);
  return s.str();
}

namespace {

struct Binder {
  std::map<std::string, Value> &values;
  std::set<std::string> used;

  template <typename T>
  const T *find(const std::string &key) {
    auto it = values.find(key);
    if (it == values.end()) return nullptr;
    used.insert(key);
    const T *v = std::get_if<T>(&it->second);
    if (!v) throw Error(ErrorCode::kParseError, "wrong type for '" + key + "'");
    return v;
  }

  void str(const std::string &key, std::string &out) {
    if (auto v = find<std::string>(key)) out = *v;
  }
  void path(const std::string &key, fs::path &out) {
    if (auto v = find<std::string>(key)) out = *v;
  }
  void path(const std::string &key, std::optional<fs::path> &out) {
    if (auto v = find<std::string>(key)) out = fs::path(*v);
  }
  void integer(const std::string &key, std::int64_t &out) {
    if (auto v = find<std::int64_t>(key)) out = *v;
  }
  void boolean(const std::string &key, bool &out) {
    if (auto v = find<bool>(key)) out = *v;
  }
  void real(const std::string &key, double &out) {
    auto it = values.find(key);
    if (it == values.end()) return;
    used.insert(key);
    if (auto d = std::get_if<double>(&it->second)) {
      out = *d;
    } else if (auto i = std::get_if<std::int64_t>(&it->second)) {
      out = static_cast<double>(*i);
    } else {
      throw Error(ErrorCode::kParseError, "wrong type for '" + key + "'");
    }
  }
};

void require_one_of(const std::string &key, const std::string &value, std::initializer_list<const char *> allowed) {
  for (const char *a : allowed) {
    if (value == a) return;
  }
  throw Error(ErrorCode::kRangeError, key + ": unsupported value '" + value + "'");
}

}  // namespace

PipelineConfig validate_config_text(const std::string &source, const fs::path &base_dir) {
  auto values = parse_toml(source);
  PipelineConfig c;
  c.base_dir = base_dir;
  Binder b{values, {}};

  std::int64_t seed = static_cast<std::int64_t>(c.seed);
  b.integer("seed", seed);
  b.real("threshold", c.threshold);
  b.boolean("offline", c.offline);
  b.path("work_dir", c.work_dir);

  b.str("ingest.mode", c.ingest_mode);
  b.path("ingest.fixtures", c.fixtures_dir);
  b.path("ingest.cache", c.page_cache_dir);
  for (Edition e : kAllEditions) b.path("ingest.manifest_" + std::string(edition_name(e)), c.manifests[edition_index(e)]);
  b.integer("ingest.delay_ms", c.delay_ms);
  b.integer("ingest.concurrency", c.concurrency);

  b.str("silver.editions", c.silver_editions);
  b.integer("silver.test_size", c.test_size);

  b.str("segment.tagger", c.tagger);
  b.path("segment.predictions", c.tagger_predictions);
  b.str("segment.policy", c.policy);
  b.path("segment.vocabulary", c.vocabulary);

  b.str("classify.ner", c.ner);
  b.path("classify.lexicon", c.lexicon_dir);
  b.path("classify.predictions", c.ner_predictions);

  b.str("store.embedding", c.embedding);
  b.integer("store.dimension", c.dimension);
  b.path("store.entry_embeddings", c.entry_embeddings);
  b.path("store.candidate_embeddings", c.candidate_embeddings);

  b.boolean("match.headword_check", c.headword_check);
  b.boolean("match.normalize_headwords", c.normalize_headwords);

  b.boolean("link.enabled", c.link_enabled);
  b.path("link.cache", c.sparql_cache_dir);
  b.path("link.candidates", c.candidates_file);
  b.boolean("link.use_aliases", c.use_aliases);

  b.path("eval.judgments", c.judgments);
  b.path("eval.confusion", c.confusion);

  for (const auto &[key, value] : values) {
    if (!b.used.count(key)) throw Error(ErrorCode::kUnknownKey, "unknown key '" + key + "'");
  }

  if (seed < 0) throw Error(ErrorCode::kRangeError, "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) {
    throw Error(ErrorCode::kRangeError, "threshold must be in (0, 1]");
  }
  require_one_of("ingest.mode", c.ingest_mode, {"fixture", "live"});
  require_one_of("segment.tagger", c.tagger, {"rule", "external"});
  require_one_of("segment.policy", c.policy, {"discard", "append"});
  require_one_of("classify.ner", c.ner, {"lexicon", "external"});
  require_one_of("store.embedding", c.embedding, {"hashed", "file"});
  if (c.delay_ms < 0) throw Error(ErrorCode::kRangeError, "ingest.delay_ms must be >= 0");
  if (c.concurrency < 1) throw Error(ErrorCode::kRangeError, "ingest.concurrency must be >= 1");
  if (c.test_size < 0) throw Error(ErrorCode::kRangeError, "silver.test_size must be >= 0");
  if (c.dimension < 1) throw Error(ErrorCode::kRangeError, "store.dimension must be >= 1");
  if (c.tagger == "external" && !c.tagger_predictions) {
    throw Error(ErrorCode::kRangeError, "segment.tagger = external needs segment.predictions");
  }
  if (c.ner == "external" && !c.ner_predictions) {
    throw Error(ErrorCode::kRangeError, "classify.ner = external needs classify.predictions");
  }
  if (c.embedding == "file" && !c.entry_embeddings) {
    throw Error(ErrorCode::kRangeError, "store.embedding = file needs store.entry_embeddings");
  }
  std::stringstream editions(c.silver_editions);
  std::string e;
  while (std::getline(editions, e, ',')) {
    if (!parse_edition(text::trim(e))) throw Error(ErrorCode::kRangeError, "silver.editions: bad edition '" + e + "'");
  }
  return c;
}

PipelineConfig validate_config(const fs::path &path) {
  std::string source;
  try {
    source = io::read_file(path);
  } catch (const Error &e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return validate_config_text(source, path.parent_path());
}

}  // namespace atlas::config
