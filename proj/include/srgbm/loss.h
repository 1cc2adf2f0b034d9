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
#ifndef SRGBM_LOSS_H_
#define SRGBM_LOSS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srgbm/data.h"
#include "srgbm/softrank.h"

namespace srgbm {

// Training objectives. The two *SoftRankMse variants compare soft ranks of
// labels against soft ranks of model scores; the Mse variants regress scores
// onto raw labels (the ablation baselines).
enum class LossVariant {
  kPointwiseMse,          // plain GBRT: 1/2 (y_j - f_j)^2 per document
  kListwiseMse,           // squared loss normalized per query (no soft rank)
  kPointwiseSoftRankMse,  // soft-rank MSE over the whole set as one list
  kListwiseSoftRankMse,   // soft-rank MSE per query (the full method)
};

const char* variant_name(LossVariant variant);
// Throws InvalidParameter on an unknown name.
LossVariant variant_from_name(std::string_view name);

struct LossSpec {
  LossVariant variant = LossVariant::kListwiseSoftRankMse;
  double epsilon = 0.01;  // soft-rank sharpness, > 0 for SoftRank variants

  bool uses_soft_rank() const {
    return variant == LossVariant::kPointwiseSoftRankMse ||
           variant == LossVariant::kListwiseSoftRankMse;
  }
};
void validate(const LossSpec& spec);

// Soft ranks of the relevance labels, fixed for the whole training run. One
// vector per list; the list structure depends on the variant (per query for
// the listwise loss, a single list of all N documents for the pointwise
// soft-rank ablation, empty for the plain MSE variants).
struct TargetRanks {
  std::vector<std::vector<double>> per_list;
};

// R_Q^(i) = soft_rank(y^(i), epsilon) for every query.
TargetRanks precompute_target_ranks(const QueryDataset& dataset,
                                    double epsilon);

// Target ranks with the list structure required by spec.variant.
TargetRanks make_target_ranks(const QueryDataset& dataset,
                              const LossSpec& spec);

// Mean-over-lists soft-rank MSE:
//   (1/K) sum_i (1 / 2 n_i) || R^(i) - Rhat^(i) ||^2.
// Throws InvalidInput if list counts or lengths disagree.
double softrank_mse_loss(const TargetRanks& targets,
                         const std::vector<SoftRankResult>& predicted);

// Negative gradient of the per-list term (1 / 2n) ||R - Rhat||^2 with respect
// to the scores that produced `predicted`, chained through the soft-rank
// Jacobian. The 1/K factor of the mean loss is left out; it is a constant
// absorbed by the learning rate.
std::vector<double> per_query_gradient(std::span<const double> target,
                                       const SoftRankResult& predicted);

// Stacked negative gradients ("residuals") of the selected loss at the given
// scores, in dataset document order. Per-query work runs in parallel when
// threads != 1; the output is deterministic regardless.
// `targets` must come from make_target_ranks with the same spec.
std::vector<double> compute_residuals(const QueryDataset& dataset,
                                      const TargetRanks& targets,
                                      std::span<const double> scores,
                                      const LossSpec& spec, int threads = 0);

// Scalar loss reported on learning curves: the mean form of each variant
// (mean over documents for pointwise MSE, mean over queries otherwise).
double training_loss(const QueryDataset& dataset, const TargetRanks& targets,
                     std::span<const double> scores, const LossSpec& spec,
                     int threads = 0);

}  // namespace srgbm

#endif  // SRGBM_LOSS_H_
