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
#ifndef SRGBM_METRICS_H_
#define SRGBM_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srgbm/data.h"

namespace srgbm {

// NDCG@k of one query with exponential gains: documents are ordered by score
// descending (stable, ties by original index) and
//   DCG@k = sum_{i=1..min(k,n)} (2^label(i) - 1) / log2(i + 1),
// normalized by the DCG of the label-descending ordering. Queries whose
// labels are all zero have no ideal ordering; they score 0 (see evaluate for
// how they are counted). Throws InvalidInput on k < 1 or length mismatch.
double ndcg_at_k(std::span<const double> labels, std::span<const double> scores,
                 std::size_t k);

// MAP@k of one query on binarized relevance (label >= 1):
//   AP@k = sum_{i=1..min(k,n)} Precision@i * rel(i) / min(R, k)
// with R the number of relevant documents in the whole query. Queries with
// R = 0 score 0.
double map_at_k(std::span<const double> labels, std::span<const double> scores,
                std::size_t k);

struct EvalReport {
  struct Entry {
    std::string metric;               // "ndcg" or "map"
    std::size_t k = 0;
    double mean = 0.0;                // arithmetic mean over all queries
    std::size_t degenerate = 0;       // queries with no relevant documents
    std::vector<double> per_query;
  };
  std::vector<Entry> entries;  // ndcg rows first, then map, ascending k
  std::size_t num_queries = 0;

  const Entry* find(const std::string& metric, std::size_t k) const;
};

// Both metrics at every truncation level, per query and averaged. Degenerate
// queries contribute 0 to the mean and are counted separately so other
// conventions can be recomputed from the report.
EvalReport evaluate(const QueryDataset& dataset, std::span<const double> scores,
                    const std::vector<std::size_t>& ks);

// Tabular text form: a header row followed by one row per (metric, k);
// per_query appends a wide per-query table.
std::string format_report(const EvalReport& report,
                          const QueryDataset* dataset_for_ids = nullptr,
                          bool per_query = false);

}  // namespace srgbm

#endif  // SRGBM_METRICS_H_
