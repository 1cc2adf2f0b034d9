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
#ifndef SRGBM_SOFTRANK_H_
#define SRGBM_SOFTRANK_H_

#include <cstddef>
#include <span>
#include <vector>

namespace srgbm {

// Isotonic solution as contiguous pooled blocks over the input order.
// Block b covers indices [boundaries[b], boundaries[b+1]) and has constant
// value means[b]; consecutive block means are strictly decreasing.
struct PavBlocks {
  std::vector<std::size_t> boundaries;  // size num_blocks()+1, first 0, last n
  std::vector<double> means;

  std::size_t num_blocks() const { return means.size(); }
};

struct IsotonicResult {
  std::vector<double> values;
  PavBlocks blocks;
};

// Solves argmin_{v_1 >= v_2 >= ... >= v_n} ||v - u||^2 with
// pool-adjacent-violators in O(n). Adjacent segments are merged whenever the
// running means fail to strictly decrease; no comparison tolerance is applied.
// Throws InvalidInput on non-finite input or n == 0.
IsotonicResult isotonic_pav(std::span<const double> u);

// Euclidean projection of z onto the permutahedron of rho (the convex hull of
// all permutations of rho). Computed by the sorting reduction: with sigma the
// stable descending sort of z, v = isotonic_pav(z_sigma - rho), the projection
// is y = z - sigma^{-1}(v).
struct ProjectionResult {
  std::vector<double> values;           // the projection y
  std::vector<std::size_t> sort_perm;   // sort_perm[k] = original index of the
                                        // k-th largest z (ties by index)
  PavBlocks blocks;                     // PAV pools over sorted positions
};

// Requires rho strictly decreasing and z finite; throws InvalidInput otherwise.
ProjectionResult permutahedron_project(std::span<const double> z,
                                       std::span<const double> rho);

// Differentiable soft ranks of a score vector.
//
// soft_rank(theta, epsilon) projects -theta/epsilon onto the permutahedron of
// rho = (n, n-1, ..., 1). The result sums to n(n+1)/2, lies in [1, n]^n, and
// is order preserving: the largest score gets the soft rank nearest 1. As
// epsilon -> 0 (distinct scores) the output reaches the hard descending
// ranks; as epsilon -> inf it flattens to the centroid (n+1)/2.
struct SoftRankResult {
  std::vector<double> soft_ranks;
  std::vector<std::size_t> sort_perm;  // sorts -theta/epsilon descending
  PavBlocks blocks;                    // pools over sorted positions
  double epsilon = 1.0;

  std::size_t size() const { return soft_ranks.size(); }
};

// Throws InvalidParameter if epsilon <= 0 (or non-finite), InvalidInput if
// theta is empty or contains non-finite entries.
SoftRankResult soft_rank(std::span<const double> theta, double epsilon);

// Applies the transpose Jacobian of soft_rank at the point that produced
// `result` to the vector g, in O(n).
//
// The Jacobian is J = -(1/epsilon) (I - P^T B P) with P the sort permutation
// and B block-wise averaging over the PAV pools; J is symmetric, so this is
// also the Jacobian-vector product. At pooling boundaries (ties) the block
// partition recorded in `result` selects a valid generalized derivative.
// Throws InvalidInput if g's length differs from result's.
std::vector<double> soft_rank_vjp(const SoftRankResult& result,
                                  std::span<const double> g);

}  // namespace srgbm

#endif  // SRGBM_SOFTRANK_H_
