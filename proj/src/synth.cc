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
#include "srgbm/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "srgbm/error.h"

namespace srgbm {

namespace {

// Distributions built on raw engine output; the standard library's
// distribution objects are not bit-reproducible across implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; u clamped away from 0 so the log stays finite.
  double u = uniform01(rng);
  if (u <= 0.0) u = 0x1.0p-53;
  const double v = uniform01(rng);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

}  // namespace

QueryDataset make_synth_dataset(const SynthConfig& config) {
  if (config.queries == 0 || config.docs_per_query == 0 ||
      config.num_features == 0) {
    throw InvalidParameter("synth: queries, docs and features must be >= 1");
  }
  if (config.num_levels < 1 || config.num_levels > 32) {
    throw InvalidParameter("synth: num_levels must be in [1, 32]");
  }
  if (config.noise < 0.0 || !std::isfinite(config.noise)) {
    throw InvalidParameter("synth: noise must be finite and >= 0");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<double> weights(config.num_features);
  for (double& w : weights) w = standard_normal(rng);

  const std::size_t n = config.docs_per_query;
  const std::size_t total = config.queries * n;

  QueryDataset ds;
  ds.features.rows = total;
  ds.features.cols = config.num_features;
  ds.features.values.resize(total * config.num_features);
  ds.labels.resize(total);
  ds.query_offsets.reserve(config.queries + 1);
  ds.query_offsets.push_back(0);
  ds.query_ids.reserve(config.queries);

  std::vector<double> quality(n);
  std::vector<std::size_t> order(n);
  for (std::size_t q = 0; q < config.queries; ++q) {
    const std::size_t base = q * n;
    for (std::size_t i = 0; i < n; ++i) {
      double* row = ds.features.values.data() + (base + i) * config.num_features;
      double score = 0.0;
      for (std::size_t j = 0; j < config.num_features; ++j) {
        row[j] = uniform01(rng);
        score += weights[j] * row[j];
      }
      quality[i] = score + config.noise * standard_normal(rng);
    }
    // Grade = within-query quantile of the latent quality.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return quality[a] < quality[b];
    });
    for (std::size_t rank = 0; rank < n; ++rank) {
      ds.labels[base + order[rank]] = static_cast<double>(
          (rank * static_cast<std::size_t>(config.num_levels)) / n);
    }
    ds.query_offsets.push_back(base + n);
    ds.query_ids.push_back(std::to_string(q + 1));
  }
  return ds;
}

std::vector<double> random_scores(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = uniform01(rng);
  return out;
}

}  // namespace srgbm
