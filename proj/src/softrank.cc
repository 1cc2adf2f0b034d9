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
#include "srgbm/softrank.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srgbm/error.h"

namespace srgbm {

namespace {

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

IsotonicResult isotonic_pav(std::span<const double> u) {
  const std::size_t n = u.size();
  if (n == 0) throw InvalidInput("isotonic_pav: empty input");
  if (!all_finite(u)) throw InvalidInput("isotonic_pav: non-finite input");

  // Stack of merged blocks; a new element is pooled backwards while the
  // running means fail to strictly decrease.
  std::vector<std::size_t> start;
  std::vector<double> sum;
  std::vector<double> cnt;
  std::vector<double> mean;
  start.reserve(n);
  sum.reserve(n);
  cnt.reserve(n);
  mean.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    start.push_back(i);
    sum.push_back(u[i]);
    cnt.push_back(1.0);
    mean.push_back(u[i]);
    while (mean.size() >= 2 && mean[mean.size() - 2] <= mean.back()) {
      const double s = sum[sum.size() - 2] + sum.back();
      const double c = cnt[cnt.size() - 2] + cnt.back();
      sum.pop_back();
      cnt.pop_back();
      mean.pop_back();
      start.pop_back();
      sum.back() = s;
      cnt.back() = c;
      mean.back() = s / c;
    }
  }

  IsotonicResult out;
  out.values.resize(n);
  out.blocks.means = mean;
  out.blocks.boundaries = start;
  out.blocks.boundaries.push_back(n);
  for (std::size_t b = 0; b < mean.size(); ++b) {
    const std::size_t lo = out.blocks.boundaries[b];
    const std::size_t hi = out.blocks.boundaries[b + 1];
    std::fill(out.values.begin() + lo, out.values.begin() + hi, mean[b]);
  }
  return out;
}

ProjectionResult permutahedron_project(std::span<const double> z,
                                       std::span<const double> rho) {
  const std::size_t n = z.size();
  if (n == 0 || rho.size() != n) {
    throw InvalidInput("permutahedron_project: size mismatch or empty input");
  }
  if (!all_finite(z) || !all_finite(rho)) {
    throw InvalidInput("permutahedron_project: non-finite input");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(rho[i] > rho[i + 1])) {
      throw InvalidInput("permutahedron_project: rho not strictly decreasing");
    }
  }

  ProjectionResult out;
  out.sort_perm.resize(n);
  std::iota(out.sort_perm.begin(), out.sort_perm.end(), std::size_t{0});

  if (n == 1) {
    // The permutahedron degenerates to the single point rho.
    out.values.assign(1, rho[0]);
    out.blocks.boundaries = {0, 1};
    out.blocks.means = {z[0] - rho[0]};
    return out;
  }

  // Stable descending sort; ties keep original document order.
  std::stable_sort(out.sort_perm.begin(), out.sort_perm.end(),
                   [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

  std::vector<double> shifted(n);
  for (std::size_t k = 0; k < n; ++k) {
    shifted[k] = z[out.sort_perm[k]] - rho[k];
  }
  IsotonicResult iso = isotonic_pav(shifted);

  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[out.sort_perm[k]] = z[out.sort_perm[k]] - iso.values[k];
  }
  out.blocks = std::move(iso.blocks);
  return out;
}

SoftRankResult soft_rank(std::span<const double> theta, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("soft_rank: epsilon must be in (0, inf)");
  }
  const std::size_t n = theta.size();
  if (n == 0) throw InvalidInput("soft_rank: empty input");
  if (!all_finite(theta)) throw InvalidInput("soft_rank: non-finite input");

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = -theta[i] / epsilon;
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = static_cast<double>(n - i);

  ProjectionResult proj = permutahedron_project(z, rho);

  SoftRankResult out;
  out.soft_ranks = std::move(proj.values);
  out.sort_perm = std::move(proj.sort_perm);
  out.blocks = std::move(proj.blocks);
  out.epsilon = epsilon;
  return out;
}

std::vector<double> soft_rank_vjp(const SoftRankResult& result,
                                  std::span<const double> g) {
  const std::size_t n = result.size();
  if (g.size() != n) throw InvalidInput("soft_rank_vjp: length mismatch");

  // J^T g = -(1/eps) (g - P^T B P g): permute into sorted order, average
  // within each pooled block, scatter back.
  std::vector<double> out(n);
  const double inv_eps = 1.0 / result.epsilon;
  const auto& bd = result.blocks.boundaries;
  for (std::size_t b = 0; b + 1 < bd.size(); ++b) {
    const std::size_t lo = bd[b];
    const std::size_t hi = bd[b + 1];
    double block_sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      block_sum += g[result.sort_perm[k]];
    }
    const double block_mean = block_sum / static_cast<double>(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = result.sort_perm[k];
      out[i] = -inv_eps * (g[i] - block_mean);
    }
  }
  return out;
}

}  // namespace srgbm
