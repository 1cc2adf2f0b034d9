/*
 * Copyright 2026 The SoftRankGBM Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "srgbm/data.h"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "srgbm/error.h"

namespace srgbm {

namespace {

struct RawDoc {
  double label = 0.0;
  std::vector<std::pair<std::size_t, double>> features;  // 1-based index
};

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

double parse_real(std::string_view tok, std::size_t line_no,
                  const char* what) {
  // std::from_chars<double> handles the full decimal/scientific grammar and
  // rejects trailing garbage, which strtod would silently accept.
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(line_no, std::string("malformed ") + what + " '" + std::string(tok) +
                      "'");
  }
  if (!std::isfinite(value)) {
    fail(line_no, std::string("non-finite ") + what + " '" + std::string(tok) +
                      "'");
  }
  return value;
}

std::size_t parse_feature_index(std::string_view tok, std::size_t line_no) {
  std::size_t idx = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, idx);
  if (ec != std::errc{} || ptr != last) {
    fail(line_no, "malformed feature index '" + std::string(tok) + "'");
  }
  if (idx == 0) fail(line_no, "feature index must be >= 1");
  return idx;
}

void append_token(std::vector<std::string_view>* out, std::string_view line,
                  std::size_t begin, std::size_t end) {
  if (end > begin) out->push_back(line.substr(begin, end - begin));
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == ' ' || line[i] == '\t') {
      append_token(&toks, line, start, i);
      start = i + 1;
    }
  }
  append_token(&toks, line, start, line.size());
  return toks;
}

}  // namespace

QueryDataset parse_letor(std::istream& in, const ParseOptions& opts) {
  std::vector<RawDoc> docs;
  std::vector<std::string> doc_qids;
  std::size_t max_feature = 0;
  std::size_t line_no = 0;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    std::vector<std::string_view> toks = split_ws(view);
    if (toks.empty()) continue;
    if (toks.size() < 2) fail(line_no, "expected '<label> qid:<id> ...'");

    RawDoc doc;
    doc.label = parse_real(toks[0], line_no, "label");
    if (doc.label < 0.0) fail(line_no, "negative relevance label");

    if (!toks[1].starts_with("qid:") || toks[1].size() <= 4) {
      fail(line_no, "malformed qid token '" + std::string(toks[1]) + "'");
    }
    std::string qid(toks[1].substr(4));

    doc.features.reserve(toks.size() - 2);
    for (std::size_t t = 2; t < toks.size(); ++t) {
      const auto colon = toks[t].find(':');
      if (colon == std::string_view::npos || colon == 0 ||
          colon + 1 >= toks[t].size()) {
        fail(line_no, "malformed feature token '" + std::string(toks[t]) + "'");
      }
      const std::size_t idx =
          parse_feature_index(toks[t].substr(0, colon), line_no);
      const double val =
          parse_real(toks[t].substr(colon + 1), line_no, "feature value");
      max_feature = std::max(max_feature, idx);
      doc.features.emplace_back(idx, val);
    }

    docs.push_back(std::move(doc));
    doc_qids.push_back(std::move(qid));
  }
  if (docs.empty()) throw ParseError("empty dataset: no document lines found");

  // Group rows by qid in first-appearance order.
  std::map<std::string, std::size_t> qid_to_group;
  std::vector<std::string> group_ids;
  std::vector<std::vector<std::size_t>> group_rows;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto it = qid_to_group.find(doc_qids[i]);
    if (it == qid_to_group.end()) {
      qid_to_group.emplace(doc_qids[i], group_ids.size());
      group_ids.push_back(doc_qids[i]);
      group_rows.emplace_back();
      group_rows.back().push_back(i);
    } else {
      if (!opts.allow_regroup) {
        const std::size_t g = it->second;
        if (group_rows[g].back() + 1 != i) {
          fail(i + 1, "qid '" + doc_qids[i] +
                          "' is not contiguous; pass allow_regroup to gather "
                          "interleaved queries");
        }
      }
      group_rows[it->second].push_back(i);
    }
  }

  QueryDataset ds;
  ds.features.rows = docs.size();
  ds.features.cols = max_feature;
  ds.features.values.assign(docs.size() * max_feature, 0.0);
  ds.labels.resize(docs.size());
  ds.query_ids = std::move(group_ids);
  ds.query_offsets.reserve(ds.query_ids.size() + 1);
  ds.query_offsets.push_back(0);

  std::size_t row = 0;
  for (const auto& rows : group_rows) {
    for (std::size_t src : rows) {
      ds.labels[row] = docs[src].label;
      double* dst = ds.features.values.data() + row * max_feature;
      for (const auto& [idx, val] : docs[src].features) {
        dst[idx - 1] = val;  // duplicate indices: last one wins
      }
      ++row;
    }
    ds.query_offsets.push_back(row);
  }
  return ds;
}

QueryDataset parse_letor_file(const std::string& path,
                              const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");
  return parse_letor(in, opts);
}

namespace {

void print_real(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_letor(const QueryDataset& dataset, std::ostream& out) {
  for (std::size_t q = 0; q < dataset.num_queries(); ++q) {
    for (std::size_t i = dataset.query_offsets[q];
         i < dataset.query_offsets[q + 1]; ++i) {
      print_real(out, dataset.labels[i]);
      out << " qid:" << dataset.query_ids[q];
      const auto row = dataset.features.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        out << ' ' << (j + 1) << ':';
        print_real(out, row[j]);
      }
      out << '\n';
    }
  }
}

void write_letor_file(const QueryDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  write_letor(dataset, out);
  out.flush();
  if (!out) throw IoError("failed writing dataset to '" + path + "'");
}

void pad_features(QueryDataset& dataset, std::size_t cols) {
  const std::size_t old_cols = dataset.features.cols;
  if (cols < old_cols) {
    throw InvalidInput("pad_features: cannot shrink from " +
                       std::to_string(old_cols) + " to " +
                       std::to_string(cols) + " columns");
  }
  if (cols == old_cols) return;
  std::vector<double> values(dataset.features.rows * cols, 0.0);
  for (std::size_t i = 0; i < dataset.features.rows; ++i) {
    std::copy_n(dataset.features.values.data() + i * old_cols, old_cols,
                values.data() + i * cols);
  }
  dataset.features.values = std::move(values);
  dataset.features.cols = cols;
}

DatasetStats dataset_stats(const QueryDataset& dataset) {
  DatasetStats s;
  s.num_queries = dataset.num_queries();
  s.num_docs = dataset.num_docs();
  s.num_features = dataset.num_features();
  std::map<double, std::size_t> hist;
  for (double label : dataset.labels) ++hist[label];
  s.label_histogram.assign(hist.begin(), hist.end());
  if (s.num_queries > 0) {
    s.min_query_size = dataset.query_size(0);
    s.max_query_size = dataset.query_size(0);
    for (std::size_t q = 0; q < s.num_queries; ++q) {
      const std::size_t size = dataset.query_size(q);
      s.min_query_size = std::min(s.min_query_size, size);
      s.max_query_size = std::max(s.max_query_size, size);
    }
    s.mean_query_size =
        static_cast<double>(s.num_docs) / static_cast<double>(s.num_queries);
  }
  return s;
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream out;
  out << "queries\t" << s.num_queries << "\n"
      << "documents\t" << s.num_docs << "\n"
      << "features\t" << s.num_features << "\n"
      << "query_size_min\t" << s.min_query_size << "\n"
      << "query_size_mean\t" << s.mean_query_size << "\n"
      << "query_size_max\t" << s.max_query_size << "\n";
  out << "label_histogram";
  for (const auto& [label, count] : s.label_histogram) {
    out << ' ' << label << ':' << count;
  }
  out << "\n";
  return out.str();
}

}  // namespace srgbm
