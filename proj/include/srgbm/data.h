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
#ifndef SRGBM_DATA_H_
#define SRGBM_DATA_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace srgbm {

// Dense row-major feature matrix. Features absent from the input are 0.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols, row-major

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// All documents of a dataset grouped by query. Documents of one query occupy
// the contiguous row range [query_offsets[i], query_offsets[i+1]) and keep
// their original file order.
struct QueryDataset {
  FeatureMatrix features;
  std::vector<double> labels;               // relevance grades, >= 0
  std::vector<std::size_t> query_offsets;   // K+1 entries, first 0, last N
  std::vector<std::string> query_ids;       // K entries

  std::size_t num_docs() const { return labels.size(); }
  std::size_t num_queries() const { return query_ids.size(); }
  std::size_t num_features() const { return features.cols; }
  std::size_t query_size(std::size_t i) const {
    return query_offsets[i + 1] - query_offsets[i];
  }
  std::span<const double> query_labels(std::size_t i) const {
    return {labels.data() + query_offsets[i], query_size(i)};
  }
};

struct ParseOptions {
  // Documents of one qid must be contiguous in the file. With
  // allow_regroup they are gathered by qid (first-appearance order)
  // instead of raising a ParseError.
  bool allow_regroup = false;
};

// Parses the LETOR/SVMLight-with-qid text format:
//   <label> qid:<id> <feature>:<value> ... [# comment]
// Feature indices are 1-based and sparse; the feature count is the maximum
// index seen anywhere in the input. Labels must be finite and >= 0.
// Throws ParseError (with a line number) on malformed input and on empty
// input, IoError if a path cannot be opened.
QueryDataset parse_letor(std::istream& in, const ParseOptions& opts = {});
QueryDataset parse_letor_file(const std::string& path,
                              const ParseOptions& opts = {});

// Writes the dataset back as LETOR text with dense 1-based features.
// Values are printed with 17 significant digits so a re-parse reproduces the
// dataset exactly.
void write_letor(const QueryDataset& dataset, std::ostream& out);
void write_letor_file(const QueryDataset& dataset, const std::string& path);

// Re-embeds the feature matrix into `cols` columns (zero padding). Used to
// align train/validation files that disagree on the maximum feature index.
// Throws InvalidInput when cols is smaller than the current width.
void pad_features(QueryDataset& dataset, std::size_t cols);

struct DatasetStats {
  std::size_t num_queries = 0;
  std::size_t num_docs = 0;
  std::size_t num_features = 0;
  std::size_t min_query_size = 0;
  std::size_t max_query_size = 0;
  double mean_query_size = 0.0;
  // (label value, count), ascending by label.
  std::vector<std::pair<double, std::size_t>> label_histogram;
};

DatasetStats dataset_stats(const QueryDataset& dataset);
std::string format_stats(const DatasetStats& stats);

}  // namespace srgbm

#endif  // SRGBM_DATA_H_
