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
#include "srgbm/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "srgbm/error.h"

namespace srgbm {

namespace {

void check_query(std::span<const double> labels, std::span<const double> scores,
                 std::size_t k, const char* op) {
  if (k < 1) throw InvalidInput(std::string(op) + ": k must be >= 1");
  if (labels.size() != scores.size()) {
    throw InvalidInput(std::string(op) + ": labels/scores length mismatch");
  }
  if (labels.empty()) throw InvalidInput(std::string(op) + ": empty query");
}

// Document order by score descending, ties by original index.
std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

double gain(double label) { return std::exp2(label) - 1.0; }

}  // namespace

double ndcg_at_k(std::span<const double> labels, std::span<const double> scores,
                 std::size_t k) {
  check_query(labels, scores, k, "ndcg_at_k");
  const std::size_t n = labels.size();
  const std::size_t depth = std::min(k, n);

  std::vector<std::size_t> order = rank_order(scores);
  double dcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    dcg += gain(labels[order[i]]) / std::log2(static_cast<double>(i) + 2.0);
  }

  std::vector<double> ideal(labels.begin(), labels.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<double>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    idcg += gain(ideal[i]) / std::log2(static_cast<double>(i) + 2.0);
  }

  if (idcg == 0.0) return 0.0;  // all labels zero: degenerate query
  return dcg / idcg;
}

double map_at_k(std::span<const double> labels, std::span<const double> scores,
                std::size_t k) {
  check_query(labels, scores, k, "map_at_k");
  const std::size_t n = labels.size();
  const std::size_t depth = std::min(k, n);

  std::size_t total_relevant = 0;
  for (double label : labels) {
    if (label >= 1.0) ++total_relevant;
  }
  if (total_relevant == 0) return 0.0;

  std::vector<std::size_t> order = rank_order(scores);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (labels[order[i]] >= 1.0) {
      ++hits;
      sum += static_cast<double>(hits) / (static_cast<double>(i) + 1.0);
    }
  }
  return sum / static_cast<double>(std::min(total_relevant, k));
}

const EvalReport::Entry* EvalReport::find(const std::string& metric,
                                          std::size_t k) const {
  for (const auto& e : entries) {
    if (e.metric == metric && e.k == k) return &e;
  }
  return nullptr;
}

EvalReport evaluate(const QueryDataset& dataset, std::span<const double> scores,
                    const std::vector<std::size_t>& ks) {
  if (scores.size() != dataset.num_docs()) {
    throw InvalidInput("evaluate: scores length does not match dataset");
  }
  for (std::size_t k : ks) {
    if (k < 1) throw InvalidInput("evaluate: k must be >= 1");
  }
  const std::size_t num_queries = dataset.num_queries();

  EvalReport report;
  report.num_queries = num_queries;
  for (const char* metric : {"ndcg", "map"}) {
    for (std::size_t k : ks) {
      EvalReport::Entry entry;
      entry.metric = metric;
      entry.k = k;
      entry.per_query.resize(num_queries);
      report.entries.push_back(std::move(entry));
    }
  }

  for (std::size_t q = 0; q < num_queries; ++q) {
    const auto labels = dataset.query_labels(q);
    const std::span<const double> query_scores{
        scores.data() + dataset.query_offsets[q], dataset.query_size(q)};
    bool ndcg_degenerate = true;
    bool map_degenerate = true;
    for (double label : labels) {
      if (label > 0.0) ndcg_degenerate = false;
      if (label >= 1.0) map_degenerate = false;
    }
    std::size_t idx = 0;
    for (std::size_t k : ks) {
      auto& entry = report.entries[idx++];
      entry.per_query[q] = ndcg_at_k(labels, query_scores, k);
      if (ndcg_degenerate) ++entry.degenerate;
    }
    for (std::size_t k : ks) {
      auto& entry = report.entries[idx++];
      entry.per_query[q] = map_at_k(labels, query_scores, k);
      if (map_degenerate) ++entry.degenerate;
    }
  }

  for (auto& entry : report.entries) {
    double sum = 0.0;
    for (double v : entry.per_query) sum += v;
    entry.mean = num_queries > 0 ? sum / static_cast<double>(num_queries) : 0.0;
  }
  return report;
}

std::string format_report(const EvalReport& report,
                          const QueryDataset* dataset_for_ids,
                          bool per_query) {
  std::ostringstream out;
  char buf[40];
  out << "metric\tk\tmean\tdegenerate\tqueries\n";
  for (const auto& entry : report.entries) {
    std::snprintf(buf, sizeof(buf), "%.6f", entry.mean);
    out << entry.metric << '@' << entry.k << '\t' << entry.k << '\t' << buf
        << '\t' << entry.degenerate << '\t' << report.num_queries << '\n';
  }
  if (per_query) {
    out << "\nquery";
    for (const auto& entry : report.entries) {
      out << '\t' << entry.metric << '@' << entry.k;
    }
    out << '\n';
    for (std::size_t q = 0; q < report.num_queries; ++q) {
      if (dataset_for_ids != nullptr) {
        out << dataset_for_ids->query_ids[q];
      } else {
        out << q;
      }
      for (const auto& entry : report.entries) {
        std::snprintf(buf, sizeof(buf), "%.6f", entry.per_query[q]);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace srgbm
