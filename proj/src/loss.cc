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
#include "srgbm/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.h"
#include "srgbm/error.h"

namespace srgbm {

namespace {

using internal::parallel_for;

double half_squared_distance(std::span<const double> a,
                             std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return 0.5 * acc;
}

}  // namespace

const char* variant_name(LossVariant variant) {
  switch (variant) {
    case LossVariant::kPointwiseMse:
      return "mse";
    case LossVariant::kListwiseMse:
      return "listwise-mse";
    case LossVariant::kPointwiseSoftRankMse:
      return "softrank-mse-pointwise";
    case LossVariant::kListwiseSoftRankMse:
      return "softrank-mse";
  }
  return "unknown";
}

LossVariant variant_from_name(std::string_view name) {
  if (name == "mse") return LossVariant::kPointwiseMse;
  if (name == "listwise-mse") return LossVariant::kListwiseMse;
  if (name == "softrank-mse-pointwise") {
    return LossVariant::kPointwiseSoftRankMse;
  }
  if (name == "softrank-mse") return LossVariant::kListwiseSoftRankMse;
  throw InvalidParameter("unknown loss variant '" + std::string(name) + "'");
}

void validate(const LossSpec& spec) {
  if (spec.uses_soft_rank() &&
      (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))) {
    throw InvalidParameter("loss: epsilon must be > 0 for soft-rank variants");
  }
}

TargetRanks precompute_target_ranks(const QueryDataset& dataset,
                                    double epsilon) {
  if (dataset.num_queries() == 0) {
    throw InvalidInput("precompute_target_ranks: empty dataset");
  }
  TargetRanks targets;
  targets.per_list.resize(dataset.num_queries());
  for (std::size_t q = 0; q < dataset.num_queries(); ++q) {
    targets.per_list[q] =
        std::move(soft_rank(dataset.query_labels(q), epsilon).soft_ranks);
  }
  return targets;
}

TargetRanks make_target_ranks(const QueryDataset& dataset,
                              const LossSpec& spec) {
  validate(spec);
  switch (spec.variant) {
    case LossVariant::kPointwiseMse:
    case LossVariant::kListwiseMse:
      return {};
    case LossVariant::kPointwiseSoftRankMse: {
      // The whole training set is soft-ranked as one list; query structure
      // is deliberately ignored in this ablation.
      TargetRanks targets;
      targets.per_list.push_back(
          std::move(soft_rank(dataset.labels, spec.epsilon).soft_ranks));
      return targets;
    }
    case LossVariant::kListwiseSoftRankMse:
      return precompute_target_ranks(dataset, spec.epsilon);
  }
  throw InvalidParameter("make_target_ranks: unknown variant");
}

double softrank_mse_loss(const TargetRanks& targets,
                         const std::vector<SoftRankResult>& predicted) {
  if (targets.per_list.size() != predicted.size() || targets.per_list.empty()) {
    throw InvalidInput("softrank_mse_loss: list count mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto& target = targets.per_list[i];
    const auto& ranks = predicted[i].soft_ranks;
    if (target.size() != ranks.size()) {
      throw InvalidInput("softrank_mse_loss: list length mismatch");
    }
    acc += half_squared_distance(target, ranks) /
           static_cast<double>(target.size());
  }
  return acc / static_cast<double>(predicted.size());
}

std::vector<double> per_query_gradient(std::span<const double> target,
                                       const SoftRankResult& predicted) {
  const std::size_t n = predicted.size();
  if (target.size() != n) {
    throw InvalidInput("per_query_gradient: length mismatch");
  }
  // d/dRhat of (1/2n)||R - Rhat||^2, then through the soft-rank Jacobian.
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = (predicted.soft_ranks[j] - target[j]) / static_cast<double>(n);
  }
  std::vector<double> grad = soft_rank_vjp(predicted, g);
  for (double& v : grad) v = -v;
  return grad;
}

std::vector<double> compute_residuals(const QueryDataset& dataset,
                                      const TargetRanks& targets,
                                      std::span<const double> scores,
                                      const LossSpec& spec, int threads) {
  const std::size_t total = dataset.num_docs();
  if (scores.size() != total) {
    throw InvalidInput("compute_residuals: scores length mismatch");
  }
  validate(spec);
  std::vector<double> out(total);

  switch (spec.variant) {
    case LossVariant::kPointwiseMse:
      for (std::size_t j = 0; j < total; ++j) {
        out[j] = dataset.labels[j] - scores[j];
      }
      break;

    case LossVariant::kListwiseMse:
      for (std::size_t q = 0; q < dataset.num_queries(); ++q) {
        const double inv_n = 1.0 / static_cast<double>(dataset.query_size(q));
        for (std::size_t j = dataset.query_offsets[q];
             j < dataset.query_offsets[q + 1]; ++j) {
          out[j] = (dataset.labels[j] - scores[j]) * inv_n;
        }
      }
      break;

    case LossVariant::kPointwiseSoftRankMse: {
      if (targets.per_list.size() != 1 || targets.per_list[0].size() != total) {
        throw InvalidInput("compute_residuals: targets do not match variant");
      }
      const SoftRankResult predicted = soft_rank(scores, spec.epsilon);
      out = per_query_gradient(targets.per_list[0], predicted);
      break;
    }

    case LossVariant::kListwiseSoftRankMse: {
      if (targets.per_list.size() != dataset.num_queries()) {
        throw InvalidInput("compute_residuals: targets do not match variant");
      }
      parallel_for(dataset.num_queries(), threads, [&](std::size_t q) {
        const std::size_t offset = dataset.query_offsets[q];
        const std::size_t n = dataset.query_size(q);
        const SoftRankResult predicted =
            soft_rank({scores.data() + offset, n}, spec.epsilon);
        const std::vector<double> grad =
            per_query_gradient(targets.per_list[q], predicted);
        std::copy(grad.begin(), grad.end(), out.begin() + offset);
      });
      break;
    }
  }
  return out;
}

double training_loss(const QueryDataset& dataset, const TargetRanks& targets,
                     std::span<const double> scores, const LossSpec& spec,
                     int threads) {
  const std::size_t total = dataset.num_docs();
  if (scores.size() != total) {
    throw InvalidInput("training_loss: scores length mismatch");
  }
  validate(spec);

  switch (spec.variant) {
    case LossVariant::kPointwiseMse:
      return half_squared_distance(dataset.labels, scores) /
             static_cast<double>(total);

    case LossVariant::kListwiseMse: {
      double acc = 0.0;
      for (std::size_t q = 0; q < dataset.num_queries(); ++q) {
        const std::size_t offset = dataset.query_offsets[q];
        const std::size_t n = dataset.query_size(q);
        acc += half_squared_distance({dataset.labels.data() + offset, n},
                                     {scores.data() + offset, n}) /
               static_cast<double>(n);
      }
      return acc / static_cast<double>(dataset.num_queries());
    }

    case LossVariant::kPointwiseSoftRankMse: {
      std::vector<SoftRankResult> predicted;
      predicted.push_back(soft_rank(scores, spec.epsilon));
      return softrank_mse_loss(targets, predicted);
    }

    case LossVariant::kListwiseSoftRankMse: {
      if (targets.per_list.size() != dataset.num_queries()) {
        throw InvalidInput("training_loss: targets do not match variant");
      }
      // Per-query terms are stored and reduced in query order so the result
      // does not depend on the thread count.
      std::vector<double> terms(dataset.num_queries());
      parallel_for(dataset.num_queries(), threads, [&](std::size_t q) {
        const std::size_t offset = dataset.query_offsets[q];
        const std::size_t n = dataset.query_size(q);
        const SoftRankResult predicted =
            soft_rank({scores.data() + offset, n}, spec.epsilon);
        terms[q] = half_squared_distance(targets.per_list[q],
                                         predicted.soft_ranks) /
                   static_cast<double>(n);
      });
      double acc = 0.0;
      for (double t : terms) acc += t;
      return acc / static_cast<double>(dataset.num_queries());
    }
  }
  throw InvalidParameter("training_loss: unknown variant");
}

}  // namespace srgbm
