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
#ifndef SRGBM_GBM_H_
#define SRGBM_GBM_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "srgbm/data.h"
#include "srgbm/loss.h"
#include "srgbm/metrics.h"

namespace srgbm {

struct TrainConfig {
  int iterations = 1000;        // T, boosting rounds
  double learning_rate = 0.1;   // gamma
  int num_leaves = 255;         // L, max leaves per tree
  double epsilon = 0.01;        // soft-rank sharpness
  int max_bins = 255;           // histogram resolution, in [2, 65535]
  int min_samples_per_leaf = 1;
  LossVariant loss = LossVariant::kListwiseSoftRankMse;
  std::vector<std::size_t> eval_ks = {1, 10};
  std::uint64_t seed = 0;
  int eval_every = 1;           // validation metric cadence on the curve
  int threads = 0;              // 0 = runtime default

  LossSpec loss_spec() const { return {loss, epsilon}; }
};

// Throws InvalidParameter on any out-of-range field.
void validate(const TrainConfig& config);

// Per-feature quantile bin edges. A value v falls into bin
// lower_bound(edges, v); splitting after bin b sends v <= edges[b] left,
// exactly matching the recorded tree threshold.
struct BinMapping {
  std::vector<std::vector<double>> edges;  // ascending, per feature

  std::size_t num_features() const { return edges.size(); }
  std::size_t bin_count(std::size_t feature) const {
    return edges[feature].size() + 1;
  }
  std::size_t bin_of(std::size_t feature, double value) const;
};

// Deterministic quantile binning: at most max_bins bins per feature, one bin
// per distinct value when there are fewer distinct values than bins, edges at
// midpoints between neighboring distinct values.
BinMapping build_feature_bins(const FeatureMatrix& features, int max_bins);

// Column-major binned copy of the training matrix.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::vector<std::uint16_t>> columns;  // [feature][row]
};
BinnedMatrix bin_features(const FeatureMatrix& features,
                          const BinMapping& bins);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (mean residual)

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(std::span<const double> row) const;
  std::size_t num_leaves() const;
};

// Greedy leaf-wise regression tree on binned features: always splits the open
// leaf with the largest squared-error gain
//   G_L^2/n_L + G_R^2/n_R - G^2/n
// until config.num_leaves leaves are open or no split has positive gain.
// Leaf values are mean residuals. Ties prefer the earliest-created leaf, then
// the lowest feature index, then the lowest threshold.
RegressionTree fit_tree(const BinnedMatrix& binned, const BinMapping& bins,
                        std::span<const double> residuals,
                        const TrainConfig& config);

// Additive model: prediction(x) = base_score + learning_rate * sum_t tree_t(x).
struct TreeEnsemble {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::size_t num_features = 0;
  TrainConfig config;  // echo of the training configuration
  std::vector<RegressionTree> trees;

  double predict_row(std::span<const double> row) const;
  // Throws InvalidInput when the feature count disagrees with training.
  std::vector<double> predict(const FeatureMatrix& features) const;
};

// One curve row per iteration. Validation metrics are NaN on iterations
// where evaluation was skipped (eval_every cadence) or absent entirely when
// no validation set was supplied.
struct LearningCurve {
  std::vector<std::string> metric_names;  // e.g. "ndcg@10"
  struct Row {
    int iteration = 0;
    double train_loss = 0.0;
    std::vector<double> valid_metrics;
  };
  std::vector<Row> rows;
};
std::string format_curve(const LearningCurve& curve);

struct TrainResult {
  TreeEnsemble model;
  LearningCurve curve;
};

// Boosted training: starts from f_0 = 0, then per iteration recomputes the
// loss residuals at the cached scores, fits one tree on all documents pooled
// across queries, and adds learning_rate times its output to the cache.
// Identical inputs and config produce a bit-identical model for any thread
// count.
TrainResult train(const QueryDataset& train_set, const TrainConfig& config,
                  const QueryDataset* valid_set = nullptr);

constexpr double kCurveNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace srgbm

#endif  // SRGBM_GBM_H_
