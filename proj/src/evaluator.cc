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
#include "atlas/evaluator.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace atlas::evaluator {

using io::json;

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto &row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

void ConfusionMatrix::validate() const {
  if (counts.size() != classes.size()) {
    throw Error(ErrorCode::kFormatError, "confusion matrix rows do not match classes");
  }
  for (const auto &row : counts) {
    if (row.size() != counts.size()) throw Error(ErrorCode::kFormatError, "confusion matrix is not square");
  }
}

namespace {

double ratio(double num, double den, bool &degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix &m) {
  m.validate();
  const std::uint64_t total = m.total();
  if (total == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix has no counts");
  const std::size_t n = m.counts.size();

  MetricsReport r;
  std::uint64_t trace = 0;
  for (std::size_t k = 0; k < n; ++k) {
    trace += m.counts[k][k];
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += m.counts[k][j];
      col += m.counts[j][k];
    }
    ClassMetrics c;
    c.name = m.classes[k];
    c.precision = ratio(double(m.counts[k][k]), double(col), c.degenerate);
    c.recall = ratio(double(m.counts[k][k]), double(row), c.degenerate);
    c.f1 = harmonic(c.precision, c.recall);
    r.precision += c.precision;
    r.recall += c.recall;
    r.f1 += c.f1;
    r.per_class.push_back(std::move(c));
  }
  r.accuracy = double(trace) / double(total);
  r.precision /= double(n);
  r.recall /= double(n);
  r.f1 /= double(n);
  return r;
}

std::vector<std::vector<double>> row_normalize(const ConfusionMatrix &m) {
  m.validate();
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.counts.size(); ++i) {
    std::uint64_t sum = 0;
    for (auto c : m.counts[i]) sum += c;
    if (sum == 0) throw Error(ErrorCode::kEmptyRow, "row " + m.classes[i] + " has no counts");
    std::vector<double> row;
    for (auto c : m.counts[i]) row.push_back(double(c) / double(sum));
    out.push_back(std::move(row));
  }
  return out;
}

ConfusionMatrix token_confusion(const std::vector<std::vector<std::uint8_t>> &gold,
                                const std::vector<std::vector<std::uint8_t>> &predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "gold and predicted sequence counts differ");
  }
  ConfusionMatrix m{{"0", "1"}, {{0, 0}, {0, 0}}};
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size()) {
      throw Error(ErrorCode::kDimensionMismatch, "sequence " + std::to_string(s) + " length differs");
    }
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      m.counts[gold[s][t] ? 1 : 0][predicted[s][t] ? 1 : 0]++;
    }
  }
  return m;
}

ConfusionMatrix read_confusion(const std::filesystem::path &path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
  ConfusionMatrix m;
  try {
    m.counts = j.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
    if (j.contains("classes")) {
      m.classes = j["classes"].get<std::vector<std::string>>();
    } else {
      for (std::size_t i = 0; i < m.counts.size(); ++i) m.classes.push_back(std::to_string(i));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

std::string Quadruple::canonical() const {
  std::vector<std::string> ids;
  for (const auto &m : members) ids.push_back(m.str());
  std::sort(ids.begin(), ids.end());
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += ids[i];
  }
  return out;
}

Quadruples extract_quadruples(const std::vector<matcher::MatchRecord> &records, CategoryLabel category) {
  Quadruples q;
  std::map<std::string, std::size_t> seen;
  for (const auto &rec : records) {
    if (rec.type != category) continue;
    Quadruple quad;
    bool complete = true;
    for (Edition e : kAllEditions) {
      if (e == rec.edition()) {
        quad.members[edition_index(e)] = rec.entry_id;
      } else if (const auto &m = rec.match_in(e)) {
        quad.members[edition_index(e)] = *m;
      } else {
        complete = false;
      }
    }
    if (!complete) continue;
    quad.qid = rec.qid;
    q.all.push_back(quad);
    auto [it, inserted] = seen.emplace(quad.canonical(), q.distinct.size());
    if (inserted) {
      q.distinct.push_back(quad);
    } else if (quad.qid) {
      auto &kept = q.distinct[it->second];
      if (!kept.qid) {
        kept.qid = quad.qid;
      } else if (*kept.qid != *quad.qid) {
        spdlog::warn("quadruple {} carries conflicting QIDs {} and {}", it->first, *kept.qid, *quad.qid);
      }
    }
  }
  return q;
}

std::map<std::string, Judgment> read_judgments(const std::filesystem::path &path) {
  std::istringstream in(io::read_file(path));
  std::map<std::string, Judgment> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("canonical_ids", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string col;
    while (std::getline(ls, col, '\t')) cols.push_back(col);
    if (cols.size() != 3) {
      throw Error(ErrorCode::kFormatError, path.string() + ":" + std::to_string(lineno) + ": expected 3 columns");
    }
    Judgment j;
    const std::string &same = cols[1];
    if (same == "1" || same == "true" || same == "yes") {
      j.same_entity = true;
    } else if (!(same == "0" || same == "false" || same == "no")) {
      throw Error(ErrorCode::kFormatError, path.string() + ":" + std::to_string(lineno) + ": bad is_same_person");
    }
    if (cols[2] != "--") j.true_qid = cols[2];
    // Accept ids in any order.
    std::vector<std::string> ids;
    std::stringstream is(cols[0]);
    std::string id;
    while (std::getline(is, id, ',')) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    std::string key;
    for (std::size_t i = 0; i < ids.size(); ++i) key += (i ? "," : "") + ids[i];
    out[key] = j;
  }
  return out;
}

LinkEvaluation link_eval(const LinkCounts &c) {
  LinkEvaluation r;
  r.counts = c;
  auto safe = [](std::size_t num, std::size_t den) { return den ? double(num) / double(den) : 0.0; };
  r.match_precision = safe(c.correct, c.distinct);
  r.quintuple_precision = safe(c.correct_quintuples, c.quintuples);
  r.empty = c.quintuples == 0;
  if (r.empty) return r;
  r.over_distinct.precision = safe(c.true_qids, c.quintuples);
  r.over_distinct.recall = safe(c.true_qids, c.distinct);
  r.over_distinct.f1 = harmonic(r.over_distinct.precision, r.over_distinct.recall);
  r.over_correct.precision = safe(c.true_qids, c.correct_quintuples);
  r.over_correct.recall = safe(c.true_qids, c.correct);
  r.over_correct.f1 = harmonic(r.over_correct.precision, r.over_correct.recall);
  return r;
}

LinkEvaluation link_eval(const Quadruples &quads, const std::map<std::string, Judgment> &judgments) {
  LinkCounts c;
  c.all = quads.all.size();
  for (const auto &q : quads.all) c.all_with_qid += q.qid.has_value();
  c.distinct = quads.distinct.size();
  for (const auto &q : quads.distinct) {
    auto it = judgments.find(q.canonical());
    if (it == judgments.end()) throw Error(ErrorCode::kMissingJudgment, q.canonical());
    const Judgment &j = it->second;
    c.correct += j.same_entity;
    if (!q.qid) continue;
    ++c.quintuples;
    c.correct_quintuples += j.same_entity;
    c.true_qids += j.true_qid && *j.true_qid == *q.qid;
  }
  return link_eval(c);
}

CorpusStats corpus_stats(const std::array<std::size_t, 4> &scraped, const std::vector<Entry> &entries,
                         const std::vector<matcher::MatchRecord> &records) {
  CorpusStats s;
  for (Edition e : kAllEditions) s.editions[edition_index(e)].scraped = scraped[edition_index(e)];
  for (const auto &entry : entries) {
    auto &es = s.editions[edition_index(entry.edition())];
    ++es.extracted;
    if (entry.category) es.categories[static_cast<int>(*entry.category)]++;
  }
  for (auto &es : s.editions) es.discarded = es.scraped > es.extracted ? es.scraped - es.extracted : 0;
  for (const auto &rec : records) {
    if (rec.qid) s.editions[edition_index(rec.edition())].links++;
  }
  for (CategoryLabel c : {CategoryLabel::kPerson, CategoryLabel::kLocation}) {
    for (Edition from : kAllEditions) {
      for (Edition to : kAllEditions) {
        if (from < to) s.diffs.push_back({from, to, c, matcher::edition_diff(records, from, to, c)});
      }
    }
  }
  return s;
}

json to_json(const MetricsReport &r) {
  json classes = json::array();
  for (const auto &c : r.per_class) {
    classes.push_back({{"class", c.name},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"degenerate", c.degenerate}});
  }
  return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall},
          {"f1", r.f1},             {"averaging", r.averaging}, {"per_class", classes}};
}

json to_json(const LinkEvaluation &r) {
  const auto &c = r.counts;
  auto prf = [](const Prf &p) {
    return json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  return {{"counts",
           {{"all", c.all},
            {"all_with_qid", c.all_with_qid},
            {"distinct", c.distinct},
            {"correct", c.correct},
            {"quintuples", c.quintuples},
            {"correct_quintuples", c.correct_quintuples},
            {"true_qids", c.true_qids}}},
          {"match_precision", r.match_precision},
          {"quintuple_precision", r.quintuple_precision},
          {"distinct_quads", prf(r.over_distinct)},
          {"correct_matches", prf(r.over_correct)},
          {"empty", r.empty}};
}

json to_json(const CorpusStats &s) {
  json editions = json::array();
  for (Edition e : kAllEditions) {
    const auto &es = s.editions[edition_index(e)];
    editions.push_back({{"edition", edition_name(e)},
                        {"scraped", es.scraped},
                        {"extracted", es.extracted},
                        {"extracted_ratio", es.extracted_ratio()},
                        {"discarded", es.discarded},
                        {"discarded_ratio", es.discarded_ratio()},
                        {"other", es.categories[0]},
                        {"locations", es.categories[1]},
                        {"persons", es.categories[2]},
                        {"links", es.links}});
  }
  json diffs = json::array();
  for (const auto &d : s.diffs) {
    diffs.push_back({{"from", edition_name(d.from)},
                     {"to", edition_name(d.to)},
                     {"category", category_name(d.category)},
                     {"added", d.diff.added},
                     {"removed", d.diff.removed}});
  }
  return {{"editions", editions}, {"edition_diffs", diffs}};
}

std::string render(const ConfusionMatrix &m, const MetricsReport &r) {
  std::string out = "Confusion matrix (rows = true, columns = predicted)\n";
  out += fmt::format("{:>12}", "");
  for (const auto &c : m.classes) out += fmt::format("{:>12}", c);
  out += '\n';
  for (std::size_t i = 0; i < m.counts.size(); ++i) {
    out += fmt::format("{:>12}", m.classes[i]);
    for (auto v : m.counts[i]) out += fmt::format("{:>12}", v);
    out += '\n';
  }
  out += fmt::format("\nAccuracy   {:.4f}\nPrecision  {:.4f}\nRecall     {:.4f}\nF1-score   {:.4f}\n(averaging: {})\n",
                     r.accuracy, r.precision, r.recall, r.f1, r.averaging);
  return out;
}

std::string render(const LinkEvaluation &r) {
  const auto &c = r.counts;
  std::string out;
  out += fmt::format("{:<8}{:>8}{:>10}{:>8}{:>10}\n", "", "Quads", "Distinct", "Match", "True QID");
  out += fmt::format("{:<8}{:>8}{:>10}{:>8}{:>10}\n", "All", c.all, c.distinct, c.correct, c.true_qids);
  out += fmt::format("{:<8}{:>8}{:>10}{:>8}{:>10}\n\n", "QID", c.all_with_qid, c.quintuples,
                     c.correct_quintuples, c.true_qids);
  out += fmt::format("Match precision      {:.1f}%\n", 100.0 * r.match_precision);
  out += fmt::format("Quintuple precision  {:.1f}%\n\n", 100.0 * r.quintuple_precision);
  if (r.empty) {
    out += "No quintuples: link metrics are empty.\n";
    return out;
  }
  out += fmt::format("{:<16}{:>10}{:>8}{:>8}\n", "", "Precision", "Recall", "F1");
  out += fmt::format("{:<16}{:>10.2f}{:>8.2f}{:>8.2f}\n", "Distinct quads", 100 * r.over_distinct.precision,
                     100 * r.over_distinct.recall, 100 * r.over_distinct.f1);
  out += fmt::format("{:<16}{:>10.2f}{:>8.2f}{:>8.2f}\n", "Correct matches", 100 * r.over_correct.precision,
                     100 * r.over_correct.recall, 100 * r.over_correct.f1);
  return out;
}

std::string render(const CorpusStats &s) {
  std::string out = fmt::format("{:<9}{:>9}{:>11}{:>7}{:>11}{:>7}\n", "Edition", "Scraped", "Extracted", "",
                                "Discarded", "");
  std::array<std::size_t, 3> totals{};
  for (Edition e : kAllEditions) {
    const auto &es = s.editions[edition_index(e)];
    out += fmt::format("{:<9}{:>9}{:>11}{:>7.2f}{:>11}{:>7.2f}\n", edition_name(e), es.scraped, es.extracted,
                       es.extracted_ratio(), es.discarded, es.discarded_ratio());
    totals[0] += es.scraped;
    totals[1] += es.extracted;
    totals[2] += es.discarded;
  }
  double t = totals[0] ? double(totals[0]) : 1.0;
  out += fmt::format("{:<9}{:>9}{:>11}{:>7.2f}{:>11}{:>7.2f}\n\n", "Total", totals[0], totals[1],
                     totals[1] / t, totals[2], totals[2] / t);

  out += fmt::format("{:<9}{:>11}{:>9}{:>7}{:>7}\n", "Edition", "Locations", "Persons", "Other", "Links");
  for (Edition e : kAllEditions) {
    const auto &es = s.editions[edition_index(e)];
    out += fmt::format("{:<9}{:>11}{:>9}{:>7}{:>7}\n", edition_name(e), es.categories[1], es.categories[2],
                       es.categories[0], es.links);
  }
  out += fmt::format("\n{:<10}{:<8}{:>7}{:>9}\n", "Category", "Editions", "Added", "Removed");
  for (const auto &d : s.diffs) {
    out += fmt::format("{:<10}{:<8}{:>7}{:>9}\n", category_name(d.category),
                       fmt::format("{}>{}", edition_name(d.from), edition_name(d.to)), d.diff.added,
                       d.diff.removed);
  }
  return out;
}

}  // namespace atlas::evaluator
