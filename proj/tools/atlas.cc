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
#include <cstdio>
#include <iostream>
#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "atlas/classifier.h"
#include "atlas/config.h"
#include "atlas/embedstore.h"
#include "atlas/evaluator.h"
#include "atlas/hashed_embedder.h"
#include "atlas/ingest.h"
#include "atlas/linker.h"
#include "atlas/matcher.h"
#include "atlas/pipeline.h"
#include "atlas/segmenter.h"
#include "atlas/silver.h"
#include "atlas/tokenizer.h"

namespace fs = std::filesystem;
using namespace atlas;

namespace {

constexpr int kExitStageFailure = 1;
constexpr int kExitValidation = 2;

bool is_validation_error(ErrorCode c) {
  return c == ErrorCode::kParseError || c == ErrorCode::kUnknownKey || c == ErrorCode::kRangeError;
}

std::shared_ptr<const Tokenizer> load_tokenizer(const std::string &vocab) {
  if (vocab.empty()) return std::make_shared<WordPieceTokenizer>();
  return std::make_shared<WordPieceTokenizer>(WordPieceTokenizer::from_file(vocab));
}

std::unique_ptr<NerTagger> load_ner(const std::string &kind, const std::string &predictions,
                                    const std::string &lexicon, const std::string &vocab) {
  if (kind == "external") {
    if (predictions.empty()) throw Error(ErrorCode::kRangeError, "--ner external needs --predictions");
    return std::make_unique<ExternalNerTagger>(ExternalNerTagger::from_file(predictions));
  }
  if (kind != "lexicon") throw Error(ErrorCode::kRangeError, "--ner must be lexicon or external");
  if (lexicon.empty()) return std::make_unique<LexiconNerTagger>(LexiconNerTagger::Lexicon{}, load_tokenizer(vocab));
  return std::make_unique<LexiconNerTagger>(LexiconNerTagger::from_dir(lexicon, load_tokenizer(vocab)));
}

void print_json(const io::json &j) { std::cout << j.dump(2) << "\n"; }

struct StageFromConfig {
  std::string config;
  bool force = false;
};

void add_config_option(CLI::App *app, StageFromConfig &opts) {
  app->add_option("--config", opts.config, "Run this stage from a pipeline configuration file");
  app->add_flag("--force", opts.force, "Rerun even if the stage is up to date");
}

int run_configured_stage(const std::string &stage, const StageFromConfig &opts) {
  auto cfg = config::validate_config(opts.config);
  pipeline::RunOptions ro;
  ro.force = opts.force;
  print_json(pipeline::run_stage(stage, cfg, ro).to_json());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cross-edition encyclopedia entry pipeline"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // ingest
  StageFromConfig ingest_cfg;
  std::string ingest_edition, ingest_manifest, ingest_out, ingest_fixtures, ingest_cache;
  bool ingest_live = false;
  int ingest_delay = 1000, ingest_concurrency = 4;
  auto *ingest_cmd = app.add_subcommand("ingest", "Scrape pages into paragraph records");
  add_config_option(ingest_cmd, ingest_cfg);
  ingest_cmd->add_option("--edition", ingest_edition, "E1..E4");
  ingest_cmd->add_option("--manifest", ingest_manifest, "Page manifest (JSON lines)");
  ingest_cmd->add_option("--out", ingest_out, "Paragraph output (JSON lines)");
  ingest_cmd->add_option("--fixtures", ingest_fixtures, "Fixture page directory");
  ingest_cmd->add_option("--cache", ingest_cache, "Page cache directory (live mode)");
  ingest_cmd->add_flag("--live", ingest_live, "Download pages instead of reading fixtures");
  ingest_cmd->add_option("--delay-ms", ingest_delay, "Minimum spacing between requests")->check(CLI::NonNegativeNumber);
  ingest_cmd->add_option("--concurrency", ingest_concurrency, "Parallel page fetches")->check(CLI::PositiveNumber);

  // silver
  StageFromConfig silver_cfg;
  auto *silver_cmd = app.add_subcommand("silver", "Build silver training data");
  add_config_option(silver_cmd, silver_cfg);
  std::vector<std::string> hw_in;
  std::string hw_out;
  std::uint64_t hw_seed = 42;
  std::size_t hw_test = 5000;
  auto *hw_cmd = silver_cmd->add_subcommand("headwords", "Headword tagging samples");
  hw_cmd->add_option("--in", hw_in, "Paragraph files")->required();
  hw_cmd->add_option("--out", hw_out, "Output directory")->required();
  hw_cmd->add_option("--seed", hw_seed, "Split seed");
  hw_cmd->add_option("--test-size", hw_test, "Held-out sample count");
  std::string cat_in, cat_out, cat_quota, cat_ner = "lexicon", cat_predictions, cat_lexicon, cat_vocab;
  std::uint64_t cat_seed = 42;
  auto *cat_cmd = silver_cmd->add_subcommand("categories", "Balanced category scaffold");
  cat_cmd->add_option("--in", cat_in, "Entries (JSON lines)")->required();
  cat_cmd->add_option("--out", cat_out, "Scaffold output (JSON lines)")->required();
  cat_cmd->add_option("--quota", cat_quota, "person,location,other")->required();
  cat_cmd->add_option("--seed", cat_seed, "Sampling seed");
  cat_cmd->add_option("--ner", cat_ner, "lexicon or external");
  cat_cmd->add_option("--predictions", cat_predictions, "External NER predictions");
  cat_cmd->add_option("--lexicon", cat_lexicon, "Lexicon directory");
  cat_cmd->add_option("--vocab", cat_vocab, "Tokenizer vocabulary");

  // segment
  StageFromConfig segment_cfg;
  std::string seg_in, seg_out, seg_tagger = "rule", seg_predictions, seg_policy = "discard", seg_vocab, seg_masks;
  auto *segment_cmd = app.add_subcommand("segment", "Split paragraphs into entries");
  add_config_option(segment_cmd, segment_cfg);
  segment_cmd->add_option("--in", seg_in, "Paragraph file of one edition");
  segment_cmd->add_option("--out", seg_out, "Entries output");
  segment_cmd->add_option("--tagger", seg_tagger, "rule or external")->check(CLI::IsMember({"rule", "external"}));
  segment_cmd->add_option("--predictions", seg_predictions, "External tagger predictions");
  segment_cmd->add_option("--policy", seg_policy, "discard or append")->check(CLI::IsMember({"discard", "append"}));
  segment_cmd->add_option("--vocab", seg_vocab, "Tokenizer vocabulary");
  segment_cmd->add_option("--masks", seg_masks, "Also write predicted masks here");

  // classify
  StageFromConfig classify_cfg;
  std::string cls_in, cls_out, cls_ner = "lexicon", cls_predictions, cls_lexicon, cls_vocab;
  auto *classify_cmd = app.add_subcommand("classify", "Label entries Person, Location or Other");
  add_config_option(classify_cmd, classify_cfg);
  classify_cmd->add_option("--in", cls_in, "Entries");
  classify_cmd->add_option("--out", cls_out, "Classified entries");
  classify_cmd->add_option("--ner", cls_ner, "lexicon or external")->check(CLI::IsMember({"lexicon", "external"}));
  classify_cmd->add_option("--predictions", cls_predictions, "External NER predictions");
  classify_cmd->add_option("--lexicon", cls_lexicon, "Lexicon directory");
  classify_cmd->add_option("--vocab", cls_vocab, "Tokenizer vocabulary");

  // store
  StageFromConfig store_cfg;
  auto *store_cmd = app.add_subcommand("store", "Embedding store");
  add_config_option(store_cmd, store_cfg);
  std::vector<std::string> build_in;
  std::string build_out;
  auto *build_cmd = store_cmd->add_subcommand("build", "Load embedding files into a store");
  build_cmd->add_option("--in", build_in, "Embedding files (binary or JSON lines)")->required();
  build_cmd->add_option("--out", build_out, "Store file")->required();
  std::string embed_entries, embed_candidates, embed_out;
  std::uint32_t embed_dim = 256;
  auto *embed_cmd = store_cmd->add_subcommand("embed", "Embed entries and candidates with the hashed embedder");
  embed_cmd->add_option("--entries", embed_entries, "Entries");
  embed_cmd->add_option("--candidates", embed_candidates, "Link candidates");
  embed_cmd->add_option("--out", embed_out, "Embedding file")->required();
  embed_cmd->add_option("--dimension", embed_dim, "Vector dimension")->check(CLI::PositiveNumber);
  std::string query_store, query_id, query_prefix;
  std::size_t query_k = 5;
  auto *query_cmd = store_cmd->add_subcommand("query", "Nearest neighbours of a stored id");
  query_cmd->add_option("--store", query_store, "Store file")->required();
  query_cmd->add_option("--id", query_id, "Query id")->required();
  query_cmd->add_option("--k", query_k, "Result count");
  query_cmd->add_option("--prefix", query_prefix, "Only ids with this prefix");

  // match
  StageFromConfig match_cfg;
  std::string match_entries, match_store, match_out;
  double match_threshold = 0.75;
  bool match_no_check = false, match_no_normalize = false;
  auto *match_cmd = app.add_subcommand("match", "Cross-edition mutual best matching");
  add_config_option(match_cmd, match_cfg);
  match_cmd->add_option("--entries", match_entries, "Classified entries");
  match_cmd->add_option("--store", match_store, "Store file");
  match_cmd->add_option("--out", match_out, "Match table (TSV)");
  match_cmd->add_option("--threshold", match_threshold, "Similarity threshold");
  match_cmd->add_flag("--no-headword-check", match_no_check, "Skip the headword gate");
  match_cmd->add_flag("--no-normalize", match_no_normalize, "Compare headwords verbatim");

  // link
  StageFromConfig link_cfg;
  std::string link_records, link_candidates, link_store, link_out;
  double link_threshold = 0.75;
  bool link_aliases = false;
  auto *link_cmd = app.add_subcommand("link", "Attach Wikidata identifiers");
  add_config_option(link_cmd, link_cfg);
  link_cmd->add_option("--records", link_records, "Match table");
  link_cmd->add_option("--candidates", link_candidates, "Link candidates");
  link_cmd->add_option("--store", link_store, "Store holding entry and wd: vectors");
  link_cmd->add_option("--out", link_out, "Linked table");
  link_cmd->add_option("--threshold", link_threshold, "Similarity threshold");
  link_cmd->add_flag("--aliases", link_aliases, "Also accept alias matches");
  std::string fetch_out, fetch_cache;
  bool fetch_offline = false;
  int fetch_delay = 1000;
  auto *fetch_cmd = link_cmd->add_subcommand("fetch", "Retrieve candidate items and article texts");
  fetch_cmd->add_option("--out", fetch_out, "Candidates output")->required();
  fetch_cmd->add_option("--cache", fetch_cache, "Response cache directory")->required();
  fetch_cmd->add_flag("--offline", fetch_offline, "Serve only from the cache");
  fetch_cmd->add_option("--delay-ms", fetch_delay, "Minimum spacing between requests")->check(CLI::NonNegativeNumber);

  // eval
  StageFromConfig eval_cfg;
  auto *eval_cmd = app.add_subcommand("eval", "Metrics");
  add_config_option(eval_cmd, eval_cfg);
  std::string tokens_confusion;
  auto *tokens_cmd = eval_cmd->add_subcommand("tokens", "Metrics from a confusion matrix");
  tokens_cmd->add_option("--confusion", tokens_confusion, "Confusion matrix JSON")->required();
  std::string links_records, links_judgments, links_denominator = "distinct";
  std::vector<std::size_t> links_counts;
  auto *links_cmd = eval_cmd->add_subcommand("links", "Match and link precision/recall");
  links_cmd->add_option("--records", links_records, "Linked table");
  links_cmd->add_option("--judgments", links_judgments, "Manual judgments (TSV)");
  links_cmd->add_option("--counts", links_counts,
                        "all,all_with_qid,distinct,correct,quintuples,correct_quintuples,true_qids")
      ->expected(7)
      ->delimiter(',');
  links_cmd->add_option("--denominator", links_denominator, "distinct or correct")
      ->check(CLI::IsMember({"distinct", "correct"}));
  std::string stats_entries, stats_records;
  std::vector<std::string> stats_paragraphs;
  auto *stats_cmd = eval_cmd->add_subcommand("stats", "Corpus statistics and edition differences");
  stats_cmd->add_option("--entries", stats_entries, "Classified entries")->required();
  stats_cmd->add_option("--records", stats_records, "Linked table")->required();
  stats_cmd->add_option("--paragraphs", stats_paragraphs, "Paragraph files");

  // run
  std::string run_config, run_stage_name;
  bool run_all = false, run_force = false;
  auto *run_cmd = app.add_subcommand("run", "Run pipeline stages from a configuration file");
  run_cmd->add_option("--config", run_config, "Pipeline configuration")->required();
  run_cmd->add_flag("--all", run_all, "Run every stage in order");
  run_cmd->add_option("--stage", run_stage_name, "Run a single stage");
  run_cmd->add_flag("--force", run_force, "Rerun stages even if up to date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("atlas"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (ingest_cmd->parsed()) {
      if (!ingest_cfg.config.empty()) return run_configured_stage("ingest", ingest_cfg);
      if (ingest_edition.empty() || ingest_manifest.empty() || ingest_out.empty()) {
        throw Error(ErrorCode::kRangeError, "ingest needs --edition, --manifest and --out (or --config)");
      }
      ingest::IngestConfig ic = ingest::default_config();
      ic.mode = ingest_live ? ingest::Mode::kLive : ingest::Mode::kFixture;
      ic.fixtures_dir = ingest_fixtures;
      ic.cache_dir = ingest_cache;
      ic.delay = std::chrono::milliseconds(ingest_delay);
      ic.concurrency = ingest_concurrency;
      std::shared_ptr<Transport> transport;
      if (ingest_live) transport = std::make_shared<HttpTransport>();
      ingest::PageFetcher fetcher(ic, transport);
      auto paragraphs = ingest::scrape_edition(edition_from_string(ingest_edition),
                                               ingest::read_manifest(ingest_manifest), fetcher, ic.concurrency);
      ingest::write_paragraphs(ingest_out, paragraphs);
      print_json({{"paragraphs", paragraphs.size()}});
      return 0;
    }

    if (silver_cmd->parsed()) {
      if (hw_cmd->parsed()) {
        std::vector<ingest::RawParagraph> paragraphs;
        for (const auto &p : hw_in) {
          auto part = ingest::read_paragraphs(p);
          paragraphs.insert(paragraphs.end(), part.begin(), part.end());
        }
        auto split = silver::build_headword_dataset(paragraphs, hw_seed, hw_test);
        silver::write_headword_dataset(hw_out, split);
        print_json({{"train", split.train.size()}, {"test", split.test.size()},
                    {"duplicates_removed", split.duplicates_removed}});
        return 0;
      }
      if (cat_cmd->parsed()) {
        auto ner = load_ner(cat_ner, cat_predictions, cat_lexicon, cat_vocab);
        auto rows = silver::build_category_scaffold(read_entries(cat_in), *ner, silver::parse_quota(cat_quota), cat_seed);
        silver::write_category_file(cat_out, rows);
        print_json({{"rows", rows.size()}});
        return 0;
      }
      if (!silver_cfg.config.empty()) return run_configured_stage("silver", silver_cfg);
      throw Error(ErrorCode::kRangeError, "silver needs a subcommand or --config");
    }

    if (segment_cmd->parsed()) {
      if (!segment_cfg.config.empty()) return run_configured_stage("segment", segment_cfg);
      if (seg_in.empty() || seg_out.empty()) throw Error(ErrorCode::kRangeError, "segment needs --in and --out");
      auto tok = load_tokenizer(seg_vocab);
      std::unique_ptr<segmenter::Tagger> tagger;
      if (seg_tagger == "external") {
        if (seg_predictions.empty()) throw Error(ErrorCode::kRangeError, "--tagger external needs --predictions");
        tagger = std::make_unique<segmenter::ExternalTagger>(segmenter::ExternalTagger::from_file(seg_predictions));
      } else {
        tagger = std::make_unique<segmenter::RuleTagger>();
      }
      auto paragraphs = ingest::read_paragraphs(seg_in);
      segmenter::SegmentReport r;
      auto entries = segmenter::segment(paragraphs, *tagger, *tok, segmenter::parse_policy(seg_policy), &r);
      write_entries(seg_out, entries);
      if (!seg_masks.empty()) {
        std::vector<segmenter::TokenMask> masks;
        for (const auto &p : paragraphs) masks.push_back(segmenter::predict_mask(p.text, *tagger, *tok, p.ordinal));
        segmenter::write_masks(seg_masks, masks);
      }
      print_json({{"paragraphs", r.paragraphs}, {"entries", r.entries}, {"discarded", r.discarded},
                  {"appended", r.appended}, {"stray_blocks", r.stray_blocks}});
      return 0;
    }

    if (classify_cmd->parsed()) {
      if (!classify_cfg.config.empty()) return run_configured_stage("classify", classify_cfg);
      if (cls_in.empty() || cls_out.empty()) throw Error(ErrorCode::kRangeError, "classify needs --in and --out");
      auto ner = load_ner(cls_ner, cls_predictions, cls_lexicon, cls_vocab);
      ClassifyReport report;
      auto entries = classify_corpus(read_entries(cls_in), *ner, &report);
      write_entries(cls_out, entries);
      io::json counts = io::json::object();
      for (CategoryLabel c : kAllCategories) counts[std::string(category_name(c))] = report.total(c);
      print_json({{"entries", entries.size()}, {"counts", counts}, {"skipped", report.skipped.size()}});
      return 0;
    }

    if (store_cmd->parsed()) {
      if (build_cmd->parsed()) {
        std::unique_ptr<embedstore::Collection> store;
        for (const auto &p : build_in) {
          auto file = embedstore::read_embedding_file(p);
          if (!store) store = std::make_unique<embedstore::Collection>("store", file.dimension);
          for (auto &v : file.vectors) store->insert(std::move(v));
        }
        store->save(build_out);
        print_json({{"vectors", store->size()}, {"dimension", store->dimension()}});
        return 0;
      }
      if (embed_cmd->parsed()) {
        embedstore::HashedEmbedder embedder(embed_dim);
        embedstore::EmbeddingFile file{embed_dim, {}};
        std::size_t skipped = 0;
        auto add = [&](std::string id, std::string_view text) {
          if (text.empty()) {
            ++skipped;
            return;
          }
          file.vectors.push_back({std::move(id), embedder.embed(text)});
        };
        if (!embed_entries.empty()) {
          for (const auto &e : read_entries(embed_entries)) add(e.id.str(), e.text);
        }
        if (!embed_candidates.empty()) {
          for (const auto &c : linker::read_candidates(embed_candidates)) {
            add(std::string(linker::kStorePrefix) + c.qid, c.article_prefix.empty() ? c.label : c.article_prefix);
          }
        }
        embedstore::write_embedding_file(embed_out, file);
        print_json({{"vectors", file.vectors.size()}, {"skipped", skipped}});
        return 0;
      }
      if (query_cmd->parsed()) {
        auto store = embedstore::Collection::load(query_store);
        std::optional<std::string_view> prefix;
        if (!query_prefix.empty()) prefix = query_prefix;
        io::json out = io::json::array();
        for (const auto &s : store.top_k(query_id, query_k, prefix)) out.push_back({{"id", s.id}, {"similarity", s.similarity}});
        print_json(out);
        return 0;
      }
      if (!store_cfg.config.empty()) return run_configured_stage("store", store_cfg);
      throw Error(ErrorCode::kRangeError, "store needs a subcommand or --config");
    }

    if (match_cmd->parsed()) {
      if (!match_cfg.config.empty()) return run_configured_stage("match", match_cfg);
      if (match_entries.empty() || match_store.empty() || match_out.empty()) {
        throw Error(ErrorCode::kRangeError, "match needs --entries, --store and --out");
      }
      matcher::MatchConfig mc{match_threshold, !match_no_check, !match_no_normalize};
      mc.validate();
      auto store = embedstore::Collection::load(match_store);
      matcher::MatchReport report;
      auto records = matcher::match_corpus(read_entries(match_entries), store, mc, &report);
      matcher::write_match_table(match_out, records);
      print_json({{"records", records.size()}, {"pairs", report.pairs},
                  {"missing_embeddings", report.missing_embeddings.size()}});
      return 0;
    }

    if (link_cmd->parsed()) {
      if (fetch_cmd->parsed()) {
        std::shared_ptr<Transport> transport;
        if (!fetch_offline) transport = std::make_shared<HttpTransport>();
        linker::SparqlClient client(fetch_cache, transport, fetch_offline, std::chrono::milliseconds(fetch_delay));
        linker::FetchReport report;
        auto candidates = linker::fetch_candidates(client, linker::endpoints_from_env(), &report);
        linker::write_candidates(fetch_out, candidates);
        print_json({{"items", report.items}, {"candidates", candidates.size()},
                    {"without_article", report.without_article}, {"network_calls", client.network_calls()}});
        return 0;
      }
      if (!link_cfg.config.empty()) return run_configured_stage("link", link_cfg);
      if (link_records.empty() || link_candidates.empty() || link_store.empty() || link_out.empty()) {
        throw Error(ErrorCode::kRangeError, "link needs --records, --candidates, --store and --out");
      }
      if (!(link_threshold > 0.0 && link_threshold <= 1.0)) throw Error(ErrorCode::kRangeError, "threshold must be in (0, 1]");
      auto store = embedstore::Collection::load(link_store);
      linker::LinkReport report;
      auto records = linker::link_corpus(matcher::read_match_table(link_records), store,
                                         linker::read_candidates(link_candidates), {link_threshold, link_aliases}, &report);
      matcher::write_match_table(link_out, records);
      print_json({{"links", report.total()}, {"skipped", report.skipped.size()}});
      return 0;
    }

    if (eval_cmd->parsed()) {
      if (tokens_cmd->parsed()) {
        auto m = evaluator::read_confusion(tokens_confusion);
        auto r = evaluator::metrics_from_confusion(m);
        std::cout << evaluator::render(m, r);
        return 0;
      }
      if (links_cmd->parsed()) {
        evaluator::LinkEvaluation le;
        if (!links_counts.empty()) {
          evaluator::LinkCounts c{links_counts[0], links_counts[1], links_counts[2], links_counts[3],
                                  links_counts[4], links_counts[5], links_counts[6]};
          le = evaluator::link_eval(c);
        } else {
          if (links_records.empty() || links_judgments.empty()) {
            throw Error(ErrorCode::kRangeError, "eval links needs --records and --judgments, or --counts");
          }
          auto quads = evaluator::extract_quadruples(matcher::read_match_table(links_records), CategoryLabel::kPerson);
          le = evaluator::link_eval(quads, evaluator::read_judgments(links_judgments));
        }
        std::cout << evaluator::render(le);
        auto d = links_denominator == "correct" ? evaluator::Denominator::kCorrect : evaluator::Denominator::kDistinct;
        const auto &row = le.row(d);
        std::printf("selected (%s): P %.2f  R %.2f  F1 %.2f\n", links_denominator.c_str(), 100 * row.precision,
                    100 * row.recall, 100 * row.f1);
        return 0;
      }
      if (stats_cmd->parsed()) {
        std::array<std::size_t, 4> scraped{};
        for (const auto &p : stats_paragraphs) {
          for (const auto &para : ingest::read_paragraphs(p)) ++scraped[edition_index(para.source.edition)];
        }
        auto stats = evaluator::corpus_stats(scraped, read_entries(stats_entries), matcher::read_match_table(stats_records));
        std::cout << evaluator::render(stats);
        return 0;
      }
      if (!eval_cfg.config.empty()) return run_configured_stage("eval", eval_cfg);
      throw Error(ErrorCode::kRangeError, "eval needs a subcommand or --config");
    }

    if (run_cmd->parsed()) {
      auto cfg = config::validate_config(run_config);
      pipeline::RunOptions ro;
      ro.force = run_force;
      if (run_all == !run_stage_name.empty()) throw Error(ErrorCode::kRangeError, "run needs exactly one of --all or --stage");
      io::json out = io::json::array();
      if (run_all) {
        for (const auto &r : pipeline::run_all(cfg, ro)) {
          out.push_back({{"stage", r.stage}, {"status", r.status}, {"summary", r.summary}});
        }
      } else {
        auto r = pipeline::run_stage(run_stage_name, cfg, ro);
        out.push_back({{"stage", r.stage}, {"status", r.status}, {"summary", r.summary}});
      }
      print_json(out);
      std::cerr << "final table: " << pipeline::final_table(cfg).string() << "\n";
      return 0;
    }
  } catch (const Error &e) {
    spdlog::error("{}", e.what());
    return is_validation_error(e.code()) ? kExitValidation : kExitStageFailure;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kExitStageFailure;
  }
  return 0;
}
