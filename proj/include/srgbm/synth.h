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
#ifndef SRGBM_SYNTH_H_
#define SRGBM_SYNTH_H_

#include <cstdint>

#include "srgbm/data.h"

namespace srgbm {

// Reproducible synthetic ranking data: features are uniform in [0, 1), the
// latent document quality is a fixed random linear function of them plus
// Gaussian noise, and labels are the per-query quantiles of that quality,
// quantized to num_levels grades (0 .. num_levels-1). Only the seed and the
// parameters determine the output; the distributions are generated from raw
// mt19937_64 draws so files are identical across platforms.
struct SynthConfig {
  std::size_t queries = 100;
  std::size_t docs_per_query = 20;
  std::size_t num_features = 10;
  int num_levels = 5;
  double noise = 0.05;  // stddev of the additive label noise
  std::uint64_t seed = 7;
};

QueryDataset make_synth_dataset(const SynthConfig& config);

// Deterministic scores for baseline comparisons, uniform in [0, 1).
std::vector<double> random_scores(std::size_t count, std::uint64_t seed);

}  // namespace srgbm

#endif  // SRGBM_SYNTH_H_
