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
#include "srgbm/gbm.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "parallel.h"
#include "srgbm/error.h"

namespace srgbm {

namespace {

using internal::parallel_for;

}  // namespace

void validate(const TrainConfig& config) {
  if (config.iterations < 1) {
    throw InvalidParameter("config: iterations must be >= 1");
  }
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw InvalidParameter("config: learning_rate must be > 0");
  }
  if (config.num_leaves < 2) {
    throw InvalidParameter("config: num_leaves must be >= 2");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw InvalidParameter("config: epsilon must be > 0");
  }
  if (config.max_bins < 2 || config.max_bins > 65535) {
    throw InvalidParameter("config: max_bins must be in [2, 65535]");
  }
  if (config.min_samples_per_leaf < 1) {
    throw InvalidParameter("config: min_samples_per_leaf must be >= 1");
  }
  if (config.eval_every < 1) {
    throw InvalidParameter("config: eval_every must be >= 1");
  }
  if (config.eval_ks.empty()) {
    throw InvalidParameter("config: at least one truncation level required");
  }
  for (std::size_t k : config.eval_ks) {
    if (k < 1) throw InvalidParameter("config: truncation level must be >= 1");
  }
  if (config.threads < 0) {
    throw InvalidParameter("config: threads must be >= 0");
  }
}

std::size_t BinMapping::bin_of(std::size_t feature, double value) const {
  const auto& e = edges[feature];
  return static_cast<std::size_t>(
      std::lower_bound(e.begin(), e.end(), value) - e.begin());
}

BinMapping build_feature_bins(const FeatureMatrix& features, int max_bins) {
  if (features.rows == 0) {
    throw InvalidInput("build_feature_bins: empty feature matrix");
  }
  const std::size_t rows = features.rows;
  const std::size_t cols = features.cols;
  const std::size_t budget = static_cast<std::size_t>(max_bins);

  BinMapping mapping;
  mapping.edges.resize(cols);

  for (std::size_t f = 0; f < cols; ++f) {
    std::vector<double> column(rows);
    for (std::size_t i = 0; i < rows; ++i) column[i] = features.at(i, f);
    std::sort(column.begin(), column.end());

    // Distinct values with multiplicities.
    std::vector<double> uniq;
    std::vector<std::size_t> count;
    for (double v : column) {
      if (uniq.empty() || v != uniq.back()) {
        uniq.push_back(v);
        count.push_back(1);
      } else {
        ++count.back();
      }
    }

    auto& edges = mapping.edges[f];
    if (uniq.size() <= budget) {
      // One bin per distinct value, edges at midpoints.
      for (std::size_t j = 0; j + 1 < uniq.size(); ++j) {
        edges.push_back(0.5 * (uniq[j] + uniq[j + 1]));
      }
    } else {
      // Quantile cuts: emit an edge each time the cumulative count passes the
      // next of max_bins equal mass targets. Integer arithmetic keeps the
      // mapping exactly reproducible.
      std::size_t cum = 0;
      for (std::size_t j = 0; j + 1 < uniq.size(); ++j) {
        cum += count[j];
        if (cum * budget >= rows * (edges.size() + 1)) {
          edges.push_back(0.5 * (uniq[j] + uniq[j + 1]));
          if (edges.size() == budget - 1) break;
        }
      }
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  return mapping;
}

BinnedMatrix bin_features(const FeatureMatrix& features,
                          const BinMapping& bins) {
  if (bins.num_features() != features.cols) {
    throw InvalidInput("bin_features: mapping feature count mismatch");
  }
  BinnedMatrix binned;
  binned.rows = features.rows;
  binned.columns.resize(features.cols);
  for (std::size_t f = 0; f < features.cols; ++f) {
    auto& column = binned.columns[f];
    column.resize(features.rows);
    for (std::size_t i = 0; i < features.rows; ++i) {
      column[i] = static_cast<std::uint16_t>(bins.bin_of(f, features.at(i, f)));
    }
  }
  return binned;
}

double RegressionTree::predict_row(std::span<const double> row) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& nd = nodes[node];
    node = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                     : nd.right;
  }
  return nodes[node].value;
}

std::size_t RegressionTree::num_leaves() const {
  std::size_t leaves = 0;
  for (const auto& nd : nodes) {
    if (nd.is_leaf()) ++leaves;
  }
  return leaves;
}

namespace {

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  std::size_t bin = 0;  // documents with bin <= this go left

  bool valid() const { return feature >= 0; }
};

struct OpenLeaf {
  int node = -1;  // -1 once split (consumed)
  std::size_t begin = 0;
  std::size_t end = 0;
  SplitCandidate best;
};

struct LeafStats {
  double sum = 0.0;
  bool pure = true;  // all residuals identical: no split can help
};

LeafStats leaf_stats(std::span<const std::uint32_t> docs,
                     std::span<const double> residuals) {
  LeafStats st;
  double lo = residuals[docs[0]];
  double hi = lo;
  for (std::uint32_t doc : docs) {
    const double r = residuals[doc];
    st.sum += r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  st.pure = (lo == hi);
  return st;
}

// Best split of one leaf: histogram per feature, then a left-to-right scan of
// the squared-error gain over every boundary. Candidates are compared with
// strict >, so the lowest feature index and lowest threshold win ties.
SplitCandidate find_best_split(const BinnedMatrix& binned,
                               const BinMapping& bins,
                               std::span<const std::uint32_t> docs,
                               std::span<const double> residuals,
                               double total_sum, const TrainConfig& config) {
  const std::size_t n = docs.size();
  const std::size_t min_leaf =
      static_cast<std::size_t>(config.min_samples_per_leaf);
  if (n < 2 * min_leaf) return {};

  const std::size_t num_features = binned.columns.size();
  std::vector<SplitCandidate> per_feature(num_features);

  parallel_for(num_features, config.threads, [&](std::size_t f) {
    const std::size_t num_bins = bins.bin_count(f);
    if (num_bins < 2) return;
    const auto& column = binned.columns[f];

    std::vector<double> bin_sum(num_bins, 0.0);
    std::vector<std::size_t> bin_cnt(num_bins, 0);
    for (std::uint32_t doc : docs) {
      bin_sum[column[doc]] += residuals[doc];
      ++bin_cnt[column[doc]];
    }

    SplitCandidate cand;
    double left_sum = 0.0;
    std::size_t left_cnt = 0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b + 1 < num_bins; ++b) {
      left_sum += bin_sum[b];
      left_cnt += bin_cnt[b];
      const std::size_t right_cnt = n - left_cnt;
      if (left_cnt < min_leaf || right_cnt < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double gain =
          left_sum * left_sum / static_cast<double>(left_cnt) +
          right_sum * right_sum / static_cast<double>(right_cnt) -
          total_sum * total_sum * inv_n;
      if (gain > cand.gain) {
        cand.gain = gain;
        cand.feature = static_cast<int>(f);
        cand.bin = b;
      }
    }
    if (cand.gain > 0.0) {
      per_feature[f] = cand;
    }
  });

  SplitCandidate best;
  for (const auto& cand : per_feature) {
    if (cand.valid() && cand.gain > best.gain) best = cand;
  }
  return best.gain > 0.0 ? best : SplitCandidate{};
}

}  // namespace

RegressionTree fit_tree(const BinnedMatrix& binned, const BinMapping& bins,
                        std::span<const double> residuals,
                        const TrainConfig& config) {
  const std::size_t n = binned.rows;
  if (n == 0) throw InvalidInput("fit_tree: no rows");
  if (residuals.size() != n) {
    throw InvalidInput("fit_tree: residuals length mismatch");
  }

  std::vector<std::uint32_t> docs(n);
  std::iota(docs.begin(), docs.end(), 0u);

  RegressionTree tree;
  std::vector<OpenLeaf> open;

  auto make_leaf = [&](std::size_t begin, std::size_t end) -> int {
    const std::span<const std::uint32_t> range{docs.data() + begin,
                                               end - begin};
    const LeafStats st = leaf_stats(range, residuals);
    TreeNode node;
    node.value = st.sum / static_cast<double>(end - begin);
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    OpenLeaf leaf;
    leaf.node = id;
    leaf.begin = begin;
    leaf.end = end;
    if (!st.pure) {
      leaf.best =
          find_best_split(binned, bins, range, residuals, st.sum, config);
    }
    open.push_back(leaf);
    return id;
  };

  make_leaf(0, n);
  std::size_t num_leaves = 1;
  std::vector<std::uint32_t> scratch;

  while (num_leaves < static_cast<std::size_t>(config.num_leaves)) {
    // Earliest-created leaf wins gain ties.
    std::size_t pick = open.size();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open[i].node >= 0 && open[i].best.valid() &&
          open[i].best.gain > best_gain) {
        best_gain = open[i].best.gain;
        pick = i;
      }
    }
    if (pick == open.size()) break;

    const OpenLeaf leaf = open[pick];
    open[pick].node = -1;
    const int feature = leaf.best.feature;
    const std::size_t split_bin = leaf.best.bin;
    const auto& column = binned.columns[static_cast<std::size_t>(feature)];

    // Stable partition: left block then right block, file order preserved.
    scratch.clear();
    std::size_t write = leaf.begin;
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      if (column[docs[i]] <= split_bin) {
        docs[write++] = docs[i];
      } else {
        scratch.push_back(docs[i]);
      }
    }
    const std::size_t mid = write;
    std::copy(scratch.begin(), scratch.end(), docs.begin() + mid);

    const int left = make_leaf(leaf.begin, mid);
    const int right = make_leaf(mid, leaf.end);
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(leaf.node)];
    parent.feature = feature;
    parent.threshold = bins.edges[static_cast<std::size_t>(feature)][split_bin];
    parent.left = left;
    parent.right = right;
    ++num_leaves;
  }
  return tree;
}

double TreeEnsemble::predict_row(std::span<const double> row) const {
  double acc = base_score;
  for (const auto& tree : trees) {
    acc += learning_rate * tree.predict_row(row);
  }
  return acc;
}

std::vector<double> TreeEnsemble::predict(const FeatureMatrix& features) const {
  if (features.cols != num_features) {
    throw InvalidInput("predict: model expects " +
                       std::to_string(num_features) + " features, data has " +
                       std::to_string(features.cols));
  }
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    out[i] = predict_row(features.row(i));
  }
  return out;
}

std::string format_curve(const LearningCurve& curve) {
  std::ostringstream out;
  out << "iteration\ttrain_loss";
  for (const auto& name : curve.metric_names) out << '\t' << name;
  out << '\n';
  char buf[40];
  for (const auto& row : curve.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.train_loss);
    out << row.iteration << '\t' << buf;
    for (double v : row.valid_metrics) {
      out << '\t';
      if (!std::isnan(v)) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

TrainResult train(const QueryDataset& train_set, const TrainConfig& config,
                  const QueryDataset* valid_set) {
  validate(config);
  if (train_set.num_docs() == 0) throw InvalidInput("train: empty dataset");
  if (valid_set != nullptr &&
      valid_set->num_features() != train_set.num_features()) {
    throw InvalidInput(
        "train: validation feature count differs from training; pad the "
        "narrower set first");
  }

  const LossSpec spec = config.loss_spec();
  const TargetRanks targets = make_target_ranks(train_set, spec);
  const BinMapping bins =
      build_feature_bins(train_set.features, config.max_bins);
  const BinnedMatrix binned = bin_features(train_set.features, bins);

  TrainResult result;
  TreeEnsemble& model = result.model;
  model.base_score = 0.0;  // f_0 = 0
  model.learning_rate = config.learning_rate;
  model.num_features = train_set.num_features();
  model.config = config;
  model.trees.reserve(static_cast<std::size_t>(config.iterations));

  LearningCurve& curve = result.curve;
  if (valid_set != nullptr) {
    for (const char* metric : {"ndcg", "map"}) {
      for (std::size_t k : config.eval_ks) {
        curve.metric_names.push_back(std::string(metric) + "@" +
                                     std::to_string(k));
      }
    }
  }
  curve.rows.reserve(static_cast<std::size_t>(config.iterations));

  std::vector<double> scores(train_set.num_docs(), model.base_score);
  std::vector<double> valid_scores(
      valid_set != nullptr ? valid_set->num_docs() : 0, model.base_score);

  for (int t = 1; t <= config.iterations; ++t) {
    const std::vector<double> residuals =
        compute_residuals(train_set, targets, scores, spec, config.threads);
    RegressionTree tree = fit_tree(binned, bins, residuals, config);

    // Cached scores advance by gamma * h_t; never re-evaluate the ensemble.
    const double gamma = config.learning_rate;
    parallel_for(train_set.num_docs(), config.threads, [&](std::size_t i) {
      scores[i] += gamma * tree.predict_row(train_set.features.row(i));
    });
    if (valid_set != nullptr) {
      parallel_for(valid_set->num_docs(), config.threads, [&](std::size_t i) {
        valid_scores[i] += gamma * tree.predict_row(valid_set->features.row(i));
      });
    }
    model.trees.push_back(std::move(tree));

    LearningCurve::Row row;
    row.iteration = t;
    row.train_loss =
        training_loss(train_set, targets, scores, spec, config.threads);
    if (valid_set != nullptr) {
      if (t % config.eval_every == 0 || t == config.iterations) {
        const EvalReport report =
            evaluate(*valid_set, valid_scores, config.eval_ks);
        for (const auto& entry : report.entries) {
          row.valid_metrics.push_back(entry.mean);
        }
      } else {
        row.valid_metrics.assign(curve.metric_names.size(), kCurveNaN);
      }
    }
    curve.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace srgbm
