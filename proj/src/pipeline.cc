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
#include "atlas/pipeline.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "atlas/classifier.h"
#include "atlas/embedstore.h"
#include "atlas/entry.h"
#include "atlas/evaluator.h"
#include "atlas/hashed_embedder.h"
#include "atlas/ingest.h"
#include "atlas/linker.h"
#include "atlas/matcher.h"
#include "atlas/segmenter.h"
#include "atlas/silver.h"
#include "atlas/text.h"
#include "atlas/tokenizer.h"

namespace atlas::pipeline {

namespace fs = std::filesystem;
using config::PipelineConfig;
using io::json;

const std::vector<std::string> &stage_names() {
  static const std::vector<std::string> names = {"ingest", "silver", "segment", "classify",
                                                 "store",  "match",  "link",    "eval"};
  return names;
}

const std::vector<std::string> &prerequisites(const std::string &stage) {
  static const std::map<std::string, std::vector<std::string>> graph = {
      {"ingest", {}},
      {"silver", {"ingest"}},
      {"segment", {"ingest"}},
      {"classify", {"segment"}},
      {"store", {"classify"}},
      {"match", {"classify", "store"}},
      {"link", {"match", "store"}},
      {"eval", {"ingest", "silver", "classify", "link"}},
  };
  auto it = graph.find(stage);
  if (it == graph.end()) throw Error(ErrorCode::kRangeError, "unknown stage '" + stage + "'");
  return it->second;
}

namespace {

std::vector<Edition> configured_editions(const PipelineConfig &cfg) {
  std::vector<Edition> out;
  for (Edition e : kAllEditions) {
    if (cfg.manifests[edition_index(e)]) out.push_back(e);
  }
  return out;
}

fs::path paragraphs_path(const PipelineConfig &cfg, Edition e) {
  return cfg.work("paragraphs_" + std::string(edition_name(e)) + ".jsonl");
}

fs::path substitute_edition(const fs::path &templ, Edition e) {
  std::string s = templ.string();
  const std::string key = "{edition}";
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key)) {
    s.replace(pos, key.size(), edition_name(e));
  }
  return s;
}

void add_tree(const fs::path &p, std::vector<fs::path> &out) {
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto &de : fs::recursive_directory_iterator(p)) {
      if (de.is_regular_file()) files.push_back(de.path());
    }
    std::sort(files.begin(), files.end());
    out.insert(out.end(), files.begin(), files.end());
  } else {
    out.push_back(p);
  }
}

// Inputs that come from outside the work directory.
std::vector<fs::path> external_inputs(const std::string &stage, const PipelineConfig &cfg) {
  std::vector<fs::path> out;
  auto opt = [&](const std::optional<fs::path> &p) {
    if (p) out.push_back(cfg.resolve(*p));
  };
  if (stage == "ingest") {
    for (Edition e : configured_editions(cfg)) {
      fs::path manifest = cfg.resolve(*cfg.manifests[edition_index(e)]);
      out.push_back(manifest);
      if (cfg.ingest_mode == "fixture" && fs::exists(manifest)) {
        for (const auto &ref : ingest::read_manifest(manifest)) {
          out.push_back(cfg.resolve(cfg.fixtures_dir) / ingest::PageFetcher::relative_path(ref));
        }
      }
    }
  } else if (stage == "segment") {
    opt(cfg.vocabulary);
    if (cfg.tagger == "external") {
      for (Edition e : configured_editions(cfg)) out.push_back(cfg.resolve(substitute_edition(*cfg.tagger_predictions, e)));
    }
  } else if (stage == "classify") {
    opt(cfg.vocabulary);
    if (cfg.ner == "external") {
      opt(cfg.ner_predictions);
    } else if (cfg.lexicon_dir) {
      add_tree(cfg.resolve(*cfg.lexicon_dir), out);
    }
  } else if (stage == "store") {
    if (cfg.embedding == "file") {
      opt(cfg.entry_embeddings);
      opt(cfg.candidate_embeddings);
    }
    if (cfg.link_enabled) {
      if (cfg.candidates_file) {
        opt(cfg.candidates_file);
      } else if (fs::is_directory(cfg.resolve(cfg.sparql_cache_dir))) {
        add_tree(cfg.resolve(cfg.sparql_cache_dir), out);
      }
    }
  } else if (stage == "eval") {
    opt(cfg.vocabulary);
    opt(cfg.judgments);
    opt(cfg.confusion);
    if (cfg.tagger == "external") {
      for (Edition e : configured_editions(cfg)) out.push_back(cfg.resolve(substitute_edition(*cfg.tagger_predictions, e)));
    }
  }
  return out;
}

std::shared_ptr<const Tokenizer> make_tokenizer(const PipelineConfig &cfg) {
  if (cfg.vocabulary) return std::make_shared<WordPieceTokenizer>(WordPieceTokenizer::from_file(cfg.resolve(*cfg.vocabulary)));
  return std::make_shared<WordPieceTokenizer>();
}

std::unique_ptr<segmenter::Tagger> make_tagger(const PipelineConfig &cfg, Edition e) {
  if (cfg.tagger == "external") {
    return std::make_unique<segmenter::ExternalTagger>(
        segmenter::ExternalTagger::from_file(cfg.resolve(substitute_edition(*cfg.tagger_predictions, e))));
  }
  return std::make_unique<segmenter::RuleTagger>();
}

std::vector<Edition> silver_editions(const PipelineConfig &cfg) {
  std::vector<Edition> out;
  std::stringstream s(cfg.silver_editions);
  std::string item;
  while (std::getline(s, item, ',')) {
    Edition e = edition_from_string(text::trim(item));
    if (cfg.manifests[edition_index(e)]) out.push_back(e);
  }
  return out;
}

std::shared_ptr<Transport> transport_for(const RunOptions &options) {
  return options.transport ? options.transport : std::make_shared<HttpTransport>();
}

json run_ingest(const PipelineConfig &cfg, const RunOptions &options) {
  ingest::IngestConfig ic = ingest::default_config();
  ic.mode = cfg.ingest_mode == "live" ? ingest::Mode::kLive : ingest::Mode::kFixture;
  ic.fixtures_dir = cfg.resolve(cfg.fixtures_dir);
  ic.cache_dir = cfg.resolve(cfg.page_cache_dir);
  ic.delay = std::chrono::milliseconds(cfg.delay_ms);
  ic.concurrency = static_cast<int>(cfg.concurrency);
  std::shared_ptr<Transport> transport;
  if (ic.mode == ingest::Mode::kLive) transport = transport_for(options);
  ingest::PageFetcher fetcher(ic, transport);
  json summary = json::object();
  for (Edition e : configured_editions(cfg)) {
    auto manifest = ingest::read_manifest(cfg.resolve(*cfg.manifests[edition_index(e)]));
    auto paragraphs = ingest::scrape_edition(e, manifest, fetcher, ic.concurrency);
    ingest::write_paragraphs(paragraphs_path(cfg, e), paragraphs);
    summary[std::string(edition_name(e))] = {{"pages", manifest.size()}, {"paragraphs", paragraphs.size()}};
  }
  return summary;
}

std::vector<ingest::RawParagraph> read_edition_paragraphs(const PipelineConfig &cfg, const std::vector<Edition> &editions) {
  std::vector<ingest::RawParagraph> all;
  for (Edition e : editions) {
    auto p = ingest::read_paragraphs(paragraphs_path(cfg, e));
    all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  return all;
}

json run_silver(const PipelineConfig &cfg) {
  auto editions = silver_editions(cfg);
  if (editions.empty()) throw Error(ErrorCode::kInsufficientData, "no ingested edition selected for silver data");
  auto split = silver::build_headword_dataset(read_edition_paragraphs(cfg, editions), cfg.seed,
                                              static_cast<std::size_t>(cfg.test_size));
  silver::write_headword_dataset(cfg.work("silver"), split);
  json counts = json::object();
  for (const auto &c : split.counts) {
    counts[std::string(edition_name(c.edition))] = {{"positives", c.positives}, {"negatives", c.negatives}};
  }
  return {{"train", split.train.size()},
          {"test", split.test.size()},
          {"duplicates_removed", split.duplicates_removed},
          {"counts", counts}};
}

json run_segment(const PipelineConfig &cfg) {
  auto tok = make_tokenizer(cfg);
  auto policy = segmenter::parse_policy(cfg.policy);
  std::vector<Entry> entries;
  segmenter::SegmentReport total;
  json per_edition = json::object();
  for (Edition e : configured_editions(cfg)) {
    auto tagger = make_tagger(cfg, e);
    segmenter::SegmentReport r;
    auto part = segmenter::segment(ingest::read_paragraphs(paragraphs_path(cfg, e)), *tagger, *tok, policy, &r);
    entries.insert(entries.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    per_edition[std::string(edition_name(e))] = {{"paragraphs", r.paragraphs},
                                                 {"entries", r.entries},
                                                 {"discarded", r.discarded},
                                                 {"appended", r.appended},
                                                 {"stray_blocks", r.stray_blocks}};
    total.paragraphs += r.paragraphs;
    total.entries += r.entries;
  }
  write_entries(cfg.work("entries.jsonl"), entries);
  json summary = {{"policy", cfg.policy}, {"tagger", cfg.tagger}, {"editions", per_edition},
                  {"paragraphs", total.paragraphs}, {"entries", total.entries}};
  io::write_file_atomic(cfg.work("segment_report.json"), summary.dump(2) + "\n");
  return summary;
}

json run_classify(const PipelineConfig &cfg) {
  std::unique_ptr<NerTagger> ner;
  if (cfg.ner == "external") {
    ner = std::make_unique<ExternalNerTagger>(ExternalNerTagger::from_file(cfg.resolve(*cfg.ner_predictions)));
  } else if (cfg.lexicon_dir) {
    ner = std::make_unique<LexiconNerTagger>(LexiconNerTagger::from_dir(cfg.resolve(*cfg.lexicon_dir), make_tokenizer(cfg)));
  } else {
    ner = std::make_unique<LexiconNerTagger>(LexiconNerTagger::Lexicon{}, make_tokenizer(cfg));
  }
  ClassifyReport report;
  auto classified = classify_corpus(read_entries(cfg.work("entries.jsonl")), *ner, &report);
  write_entries(cfg.work("classified.jsonl"), classified);
  json counts = json::object();
  for (Edition e : kAllEditions) {
    json row = json::object();
    for (CategoryLabel c : kAllCategories) row[std::string(category_name(c))] = report.count(e, c);
    counts[std::string(edition_name(e))] = row;
  }
  json skipped = json::array();
  for (const auto &[id, err] : report.skipped) skipped.push_back({{"entry_id", id}, {"error", err}});
  json summary = {{"ner", ner->name()}, {"counts", counts}, {"skipped", skipped}};
  io::write_file_atomic(cfg.work("classify_report.json"), summary.dump(2) + "\n");
  return {{"ner", ner->name()}, {"entries", classified.size()}, {"skipped", report.skipped.size()}};
}

std::vector<linker::LinkCandidate> load_candidates(const PipelineConfig &cfg, const RunOptions &options,
                                                   json &summary) {
  if (!cfg.link_enabled) return {};
  if (cfg.candidates_file) return linker::read_candidates(cfg.resolve(*cfg.candidates_file));
  std::shared_ptr<Transport> transport;
  if (!cfg.offline) transport = transport_for(options);
  linker::SparqlClient client(cfg.resolve(cfg.sparql_cache_dir), transport, cfg.offline,
                              std::chrono::milliseconds(cfg.delay_ms));
  linker::FetchReport report;
  auto candidates = linker::fetch_candidates(client, linker::endpoints_from_env(), &report);
  summary["fetch"] = {{"items", report.items},
                      {"without_article", report.without_article},
                      {"duplicates", report.duplicates},
                      {"network_calls", client.network_calls()}};
  return candidates;
}

std::string with_store_prefix(const std::string &id) {
  if (id.rfind(linker::kStorePrefix, 0) == 0) return id;
  return std::string(linker::kStorePrefix) + id;
}

json run_store(const PipelineConfig &cfg, const RunOptions &options) {
  json summary = json::object();
  auto entries = read_entries(cfg.work("classified.jsonl"));
  auto candidates = load_candidates(cfg, options, summary);
  linker::write_candidates(cfg.work("candidates.jsonl"), candidates);

  std::size_t skipped = 0;
  std::unique_ptr<embedstore::Collection> store;
  if (cfg.embedding == "hashed") {
    embedstore::HashedEmbedder embedder(static_cast<std::uint32_t>(cfg.dimension));
    store = std::make_unique<embedstore::Collection>("store", embedder.dimension());
    auto add = [&](std::string id, std::string_view text) {
      auto v = embedder.embed(text);
      if (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; })) {
        ++skipped;
        return;
      }
      store->insert({std::move(id), std::move(v)});
    };
    for (const auto &e : entries) add(e.id.str(), e.text);
    for (const auto &c : candidates) add(with_store_prefix(c.qid), c.article_prefix.empty() ? c.label : c.article_prefix);
  } else {
    auto file = embedstore::read_embedding_file(cfg.resolve(*cfg.entry_embeddings));
    store = std::make_unique<embedstore::Collection>("store", file.dimension);
    for (auto &v : file.vectors) store->insert(std::move(v));
    if (cfg.candidate_embeddings && cfg.link_enabled) {
      auto cf = embedstore::read_embedding_file(cfg.resolve(*cfg.candidate_embeddings));
      if (cf.dimension != file.dimension) {
        throw Error(ErrorCode::kDimensionMismatch, "entry and candidate embedding files disagree on dimension");
      }
      for (auto &v : cf.vectors) store->insert({with_store_prefix(v.id), std::move(v.values)});
    }
  }
  store->save(cfg.work("store.atle"));
  summary["embedding"] = cfg.embedding;
  summary["dimension"] = store->dimension();
  summary["vectors"] = store->size();
  summary["candidates"] = candidates.size();
  summary["skipped_empty"] = skipped;
  return summary;
}

json run_match(const PipelineConfig &cfg) {
  auto entries = read_entries(cfg.work("classified.jsonl"));
  auto store = embedstore::Collection::load(cfg.work("store.atle"));
  matcher::MatchConfig mc{cfg.threshold, cfg.headword_check, cfg.normalize_headwords};
  matcher::MatchReport report;
  auto records = matcher::match_corpus(entries, store, mc, &report);
  matcher::write_match_table(cfg.work("matches.tsv"), records);
  json summary = {{"records", records.size()}, {"pairs", report.pairs}, {"threshold", cfg.threshold},
                  {"missing_embeddings", report.missing_embeddings}};
  io::write_file_atomic(cfg.work("match_report.json"), summary.dump(2) + "\n");
  return {{"records", records.size()}, {"pairs", report.pairs},
          {"missing_embeddings", report.missing_embeddings.size()}};
}

json run_link(const PipelineConfig &cfg) {
  auto records = matcher::read_match_table(cfg.work("matches.tsv"));
  linker::LinkReport report;
  if (cfg.link_enabled) {
    auto store = embedstore::Collection::load(cfg.work("store.atle"));
    auto candidates = linker::read_candidates(cfg.work("candidates.jsonl"));
    records = linker::link_corpus(std::move(records), store, candidates, {cfg.threshold, cfg.use_aliases}, &report);
  }
  matcher::write_match_table(final_table(cfg), records);
  json per_edition = json::object();
  for (Edition e : kAllEditions) per_edition[std::string(edition_name(e))] = report.links[edition_index(e)];
  json summary = {{"enabled", cfg.link_enabled}, {"links", report.total()}, {"per_edition", per_edition},
                  {"skipped", report.skipped}};
  io::write_file_atomic(cfg.work("link_report.json"), summary.dump(2) + "\n");
  return {{"enabled", cfg.link_enabled}, {"links", report.total()}};
}

// Token-level agreement of the configured tagger with the held-out silver
// masks.
std::optional<evaluator::ConfusionMatrix> silver_token_confusion(const PipelineConfig &cfg, std::size_t &unaligned) {
  fs::path test = cfg.work("silver") / "test.jsonl";
  if (!fs::exists(test)) return std::nullopt;
  auto samples = silver::read_samples(test);
  if (samples.empty()) return std::nullopt;
  auto tok = make_tokenizer(cfg);
  std::map<std::pair<Edition, std::uint64_t>, std::string> raw;
  for (const auto &p : read_edition_paragraphs(cfg, silver_editions(cfg))) raw[{p.source.edition, p.ordinal}] = p.text;
  std::map<Edition, std::unique_ptr<segmenter::Tagger>> taggers;
  std::vector<std::vector<std::uint8_t>> gold, predicted;
  for (const auto &s : samples) {
    auto it = raw.find({s.edition, s.source_ordinal});
    if (it == raw.end()) continue;
    auto &tagger = taggers[s.edition];
    if (!tagger) tagger = make_tagger(cfg, s.edition);
    try {
      auto g = segmenter::align_mask(s, *tok);
      auto p = segmenter::predict_mask(it->second, *tagger, *tok, s.source_ordinal);
      std::size_t n = std::min(g.labels.size(), p.labels.size());
      g.labels.resize(n);
      p.labels.resize(n);
      gold.push_back(std::move(g.labels));
      predicted.push_back(std::move(p.labels));
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kAlignmentFailed) throw;
      ++unaligned;
    }
  }
  if (gold.empty()) return std::nullopt;
  return evaluator::token_confusion(gold, predicted);
}

json run_eval(const PipelineConfig &cfg) {
  std::array<std::size_t, 4> scraped{};
  for (Edition e : configured_editions(cfg)) {
    scraped[edition_index(e)] = ingest::read_paragraphs(paragraphs_path(cfg, e)).size();
  }
  auto entries = read_entries(cfg.work("classified.jsonl"));
  auto records = matcher::read_match_table(final_table(cfg));
  auto stats = evaluator::corpus_stats(scraped, entries, records);
  json report = {{"corpus", evaluator::to_json(stats)}};
  std::string rendered = evaluator::render(stats);

  std::size_t unaligned = 0;
  if (auto m = silver_token_confusion(cfg, unaligned)) {
    auto metrics = evaluator::metrics_from_confusion(*m);
    report["silver_tokens"] = evaluator::to_json(metrics);
    report["silver_tokens"]["unaligned"] = unaligned;
    rendered += "\nheadword tagger on silver test split\n" + evaluator::render(*m, metrics);
  }
  if (cfg.confusion) {
    auto m = evaluator::read_confusion(cfg.resolve(*cfg.confusion));
    auto metrics = evaluator::metrics_from_confusion(m);
    report["confusion"] = evaluator::to_json(metrics);
    rendered += "\nsupplied confusion matrix\n" + evaluator::render(m, metrics);
  }
  if (cfg.judgments) {
    auto quads = evaluator::extract_quadruples(records, CategoryLabel::kPerson);
    auto le = evaluator::link_eval(quads, evaluator::read_judgments(cfg.resolve(*cfg.judgments)));
    report["links"] = evaluator::to_json(le);
    rendered += "\nperson quadruples\n" + evaluator::render(le);
  }
  io::write_file_atomic(cfg.work("eval.json"), report.dump(2) + "\n");
  io::write_file_atomic(cfg.work("eval.txt"), rendered);
  return report;
}

json execute(const std::string &stage, const PipelineConfig &cfg, const RunOptions &options) {
  if (stage == "ingest") return run_ingest(cfg, options);
  if (stage == "silver") return run_silver(cfg);
  if (stage == "segment") return run_segment(cfg);
  if (stage == "classify") return run_classify(cfg);
  if (stage == "store") return run_store(cfg, options);
  if (stage == "match") return run_match(cfg);
  if (stage == "link") return run_link(cfg);
  if (stage == "eval") return run_eval(cfg);
  throw Error(ErrorCode::kRangeError, "unknown stage '" + stage + "'");
}

std::map<std::string, std::string> hash_all(const std::vector<fs::path> &paths) {
  std::map<std::string, std::string> out;
  for (const auto &p : paths) out[p.lexically_normal().string()] = io::file_hash(p);
  return out;
}

std::optional<json> last_logged(const fs::path &log, const std::string &stage) {
  if (!fs::exists(log)) return std::nullopt;
  std::optional<json> found;
  std::ifstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) continue;
    if (row.value("stage", "") == stage) found = std::move(row);
  }
  return found;
}

void append_log(const fs::path &log, const json &row) {
  std::ofstream out(log, std::ios::app | std::ios::binary);
  out << row.dump() << "\n";
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + log.string());
}

bool up_to_date(const json &logged, const std::string &config_hash, const std::map<std::string, std::string> &inputs,
                const std::vector<fs::path> &outputs) {
  if (logged.value("config_hash", "") != config_hash) return false;
  if (logged.value("inputs", json::object()) != json(inputs)) return false;
  json recorded = logged.value("outputs", json::object());
  for (const auto &p : outputs) {
    std::string key = p.lexically_normal().string();
    if (!fs::exists(p) || !recorded.contains(key) || recorded[key] != io::file_hash(p)) return false;
  }
  return true;
}

StageReport run_unlocked(const std::string &name, const PipelineConfig &cfg, const RunOptions &options) {
  std::vector<fs::path> inputs;
  for (const auto &pre : prerequisites(name)) {
    for (const auto &p : stage_outputs(pre, cfg)) {
      if (!fs::exists(p)) {
        throw Error(ErrorCode::kMissingPrerequisite,
                    "stage '" + name + "' needs '" + pre + "' output " + p.string());
      }
      inputs.push_back(p);
    }
  }
  std::vector<fs::path> external;
  try {
    external = external_inputs(name, cfg);
  } catch (const Error &e) {
    throw Error(ErrorCode::kStageFailed, name + ": " + e.what());
  }
  for (const auto &p : external) {
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kMissingPrerequisite, "stage '" + name + "' input " + p.string() + " does not exist");
    }
    inputs.push_back(p);
  }

  StageReport report;
  report.stage = name;
  report.inputs = hash_all(inputs);
  std::string config_hash = io::fnv1a_hex(cfg.fingerprint());
  auto outputs = stage_outputs(name, cfg);
  auto log = run_log_path(cfg);

  auto start = std::chrono::steady_clock::now();
  auto logged = last_logged(log, name);
  if (!options.force && logged && up_to_date(*logged, config_hash, report.inputs, outputs)) {
    report.status = "unchanged";
    report.outputs = hash_all(outputs);
    report.summary = logged->value("summary", json::object());
  } else {
    fs::create_directories(cfg.work(""));
    try {
      report.summary = execute(name, cfg, options);
    } catch (const Error &e) {
      if (e.code() == ErrorCode::kMissingPrerequisite || e.code() == ErrorCode::kStageFailed) throw;
      throw Error(ErrorCode::kStageFailed, name + ": " + e.what());
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kStageFailed, name + ": " + e.what());
    }
    report.status = "ran";
    report.outputs = hash_all(outputs);
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  json row = report.to_json();
  row["config_hash"] = config_hash;
  append_log(log, row);
  spdlog::info("stage {} {} in {:.1f} ms", name, report.status, report.elapsed_ms);
  return report;
}

}  // namespace

std::vector<fs::path> stage_outputs(const std::string &stage, const PipelineConfig &cfg) {
  if (stage == "ingest") {
    std::vector<fs::path> out;
    for (Edition e : configured_editions(cfg)) out.push_back(paragraphs_path(cfg, e));
    return out;
  }
  if (stage == "silver") {
    fs::path d = cfg.work("silver");
    return {d / "train.jsonl", d / "test.jsonl", d / "counts.json"};
  }
  if (stage == "segment") return {cfg.work("entries.jsonl"), cfg.work("segment_report.json")};
  if (stage == "classify") return {cfg.work("classified.jsonl"), cfg.work("classify_report.json")};
  if (stage == "store") return {cfg.work("store.atle"), cfg.work("candidates.jsonl")};
  if (stage == "match") return {cfg.work("matches.tsv"), cfg.work("match_report.json")};
  if (stage == "link") return {final_table(cfg), cfg.work("link_report.json")};
  if (stage == "eval") return {cfg.work("eval.json"), cfg.work("eval.txt")};
  throw Error(ErrorCode::kRangeError, "unknown stage '" + stage + "'");
}

fs::path final_table(const PipelineConfig &cfg) { return cfg.work("atlas.tsv"); }

fs::path run_log_path(const PipelineConfig &cfg) { return cfg.work("run_log.jsonl"); }

json StageReport::to_json() const {
  return {{"stage", stage}, {"status", status}, {"inputs", inputs}, {"outputs", outputs},
          {"summary", summary}, {"elapsed_ms", elapsed_ms}};
}

WorkDirLock::WorkDirLock(const fs::path &work_dir) : path_(work_dir / ".atlas.lock") {
  fs::create_directories(work_dir);
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kStageFailed, "work directory is locked by another run: " + path_.string());
  }
  std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

WorkDirLock::~WorkDirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

StageReport run_stage(const std::string &name, const PipelineConfig &cfg, const RunOptions &options) {
  prerequisites(name);
  WorkDirLock lock(cfg.work(""));
  return run_unlocked(name, cfg, options);
}

std::vector<StageReport> run_all(const PipelineConfig &cfg, const RunOptions &options) {
  WorkDirLock lock(cfg.work(""));
  std::vector<StageReport> reports;
  for (const auto &name : stage_names()) reports.push_back(run_unlocked(name, cfg, options));
  return reports;
}

}  // namespace atlas::pipeline
