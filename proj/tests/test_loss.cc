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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "srgbm/data.h"
#include "srgbm/error.h"
#include "srgbm/loss.h"
#include "srgbm/synth.h"
#include "test_util.h"

using namespace srgbm;
using namespace srgbm::testing;

namespace {

QueryDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_letor(in);
}

// Scalar objectives the residuals must be the negative gradients of. These
// deliberately re-state the definitions instead of calling training_loss:
// the residual convention drops constant factors (1/K), so the matching
// objective is the plain sum over per-list terms.
double objective(const QueryDataset& ds, const TargetRanks& targets,
                 const std::vector<double>& scores, const LossSpec& spec) {
  switch (spec.variant) {
    case LossVariant::kPointwiseMse: {
      double acc = 0.0;
      for (std::size_t j = 0; j < ds.num_docs(); ++j) {
        const double d = ds.labels[j] - scores[j];
        acc += 0.5 * d * d;
      }
      return acc;
    }
    case LossVariant::kListwiseMse: {
      double acc = 0.0;
      for (std::size_t q = 0; q < ds.num_queries(); ++q) {
        double term = 0.0;
        for (std::size_t j = ds.query_offsets[q]; j < ds.query_offsets[q + 1];
             ++j) {
          const double d = ds.labels[j] - scores[j];
          term += 0.5 * d * d;
        }
        acc += term / static_cast<double>(ds.query_size(q));
      }
      return acc;
    }
    case LossVariant::kPointwiseSoftRankMse: {
      const auto ranks = soft_rank(scores, spec.epsilon).soft_ranks;
      double acc = 0.0;
      for (std::size_t j = 0; j < ds.num_docs(); ++j) {
        const double d = targets.per_list[0][j] - ranks[j];
        acc += 0.5 * d * d;
      }
      return acc / static_cast<double>(ds.num_docs());
    }
    case LossVariant::kListwiseSoftRankMse: {
      double acc = 0.0;
      for (std::size_t q = 0; q < ds.num_queries(); ++q) {
        const std::size_t offset = ds.query_offsets[q];
        const std::size_t n = ds.query_size(q);
        const auto ranks =
            soft_rank({scores.data() + offset, n}, spec.epsilon).soft_ranks;
        double term = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double d = targets.per_list[q][j] - ranks[j];
          term += 0.5 * d * d;
        }
        acc += term / static_cast<double>(n);
      }
      return acc;
    }
  }
  return 0.0;
}

}  // namespace

TEST_CASE("precompute_target_ranks") {
  SUBCASE("tied labels get the centroid") {
    const QueryDataset ds = parse("1 qid:1 1:1\n1 qid:1 1:2\n");
    const TargetRanks targets = precompute_target_ranks(ds, 0.5);
    CHECK(targets.per_list[0][0] == doctest::Approx(1.5));
    CHECK(targets.per_list[0][1] == doctest::Approx(1.5));
  }
  SUBCASE("well separated labels reach hard ranks") {
    const QueryDataset ds = parse("4 qid:1 1:1\n0 qid:1 1:2\n");
    const TargetRanks targets = precompute_target_ranks(ds, 0.01);
    CHECK(targets.per_list[0][0] == doctest::Approx(1.0));
    CHECK(targets.per_list[0][1] == doctest::Approx(2.0));
    // Oracle: exhaustive projection of -labels/epsilon.
    const std::vector<double> z{-400.0, 0.0};
    const std::vector<double> rho{2.0, 1.0};
    CHECK(max_abs_diff(targets.per_list[0],
                       oracle_permutahedron_project(z, rho)) <= 1e-9);
  }
  SUBCASE("single-document query gets rank 1") {
    const QueryDataset ds = parse("3 qid:1 1:1\n");
    const TargetRanks targets = precompute_target_ranks(ds, 2.0);
    CHECK(targets.per_list[0] == std::vector<double>{1.0});
  }
}

TEST_CASE("softrank_mse_loss worked examples") {
  TargetRanks targets;
  targets.per_list = {{1.0, 2.0}};
  std::vector<SoftRankResult> predicted(1);
  predicted[0] = soft_rank(std::vector<double>{0.0, 10.0}, 0.01);
  REQUIRE(predicted[0].soft_ranks[0] == doctest::Approx(2.0));

  SUBCASE("single swapped pair") {
    // (1/(2*2)) * ((1-2)^2 + (2-1)^2) = 0.5
    CHECK(softrank_mse_loss(targets, predicted) == doctest::Approx(0.5));
  }
  SUBCASE("exact match is zero") {
    targets.per_list = {{2.0, 1.0}};
    CHECK(softrank_mse_loss(targets, predicted) == doctest::Approx(0.0));
  }
  SUBCASE("mean over queries") {
    targets.per_list = {{1.0, 2.0}, {2.0, 1.0}};
    predicted.push_back(predicted[0]);  // second query loss 0, first 0.5
    CHECK(softrank_mse_loss(targets, predicted) == doctest::Approx(0.25));
  }
  SUBCASE("shape mismatch") {
    targets.per_list = {{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(softrank_mse_loss(targets, predicted), InvalidInput);
    targets.per_list = {{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(softrank_mse_loss(targets, predicted), InvalidInput);
  }
}

TEST_CASE("per_query_gradient") {
  SUBCASE("zero at the optimum") {
    const std::vector<double> theta{3.0, 1.0, 2.0};
    const auto predicted = soft_rank(theta, 0.5);
    const auto grad = per_query_gradient(predicted.soft_ranks, predicted);
    for (double v : grad) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("singleton is zero") {
    const auto predicted = soft_rank(std::vector<double>{5.0}, 0.5);
    const auto grad = per_query_gradient(std::vector<double>{1.0}, predicted);
    CHECK(grad == std::vector<double>{0.0});
  }
  SUBCASE("matches finite differences of the per-query loss") {
    Rng rng(21);
    int tested = 0;
    for (int rep = 0; rep < 60 && tested < 25; ++rep) {
      const std::size_t n = 5;
      const std::vector<double> scores = rng.vector(n, -1.0, 1.0);
      std::vector<double> target(n);
      for (double& v : target) v = static_cast<double>(rng.index(5));
      const double eps = 0.8;
      const auto predicted = soft_rank(scores, eps);
      bool stable = true;
      for (std::size_t b = 0; b + 1 < predicted.blocks.num_blocks(); ++b) {
        if (predicted.blocks.means[b] - predicted.blocks.means[b + 1] < 1e-3) {
          stable = false;
        }
      }
      if (!stable) continue;
      ++tested;
      const std::vector<double> target_ranks =
          soft_rank(target, eps).soft_ranks;
      const auto grad =
          per_query_gradient(target_ranks, predicted);
      const auto fd = fd_gradient(
          [&](const std::vector<double>& point) {
            const auto ranks = soft_rank(point, eps).soft_ranks;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double d = target_ranks[j] - ranks[j];
              acc += d * d;
            }
            return acc / (2.0 * static_cast<double>(n));
          },
          scores, 1e-4);
      std::vector<double> neg_fd(fd);
      for (double& v : neg_fd) v = -v;
      CHECK(rel_error(grad, neg_fd) <= 1e-5);
    }
    CHECK(tested >= 20);
  }
  SUBCASE("length mismatch") {
    const auto predicted = soft_rank(std::vector<double>{1.0, 2.0}, 1.0);
    CHECK_THROWS_AS(per_query_gradient(std::vector<double>{1.0}, predicted),
                    InvalidInput);
  }
}

TEST_CASE("compute_residuals worked examples") {
  SUBCASE("pointwise mse is the plain residual") {
    const QueryDataset ds = parse("1 qid:1 1:1\n0 qid:1 1:2\n");
    const LossSpec spec{LossVariant::kPointwiseMse, 0.1};
    const auto residuals = compute_residuals(
        ds, {}, std::vector<double>{0.0, 0.0}, spec);
    CHECK(residuals == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("listwise mse scales by query size") {
    const QueryDataset ds = parse(
        "2 qid:1 1:1\n"
        "1 qid:2 1:2\n"
        "0 qid:2 1:3\n");
    const LossSpec spec{LossVariant::kListwiseMse, 0.1};
    const auto residuals = compute_residuals(
        ds, {}, std::vector<double>(3, 0.0), spec);
    CHECK(residuals == std::vector<double>{2.0, 0.5, 0.0});
  }
  SUBCASE("listwise softrank residual vanishes when ranks already match") {
    const QueryDataset ds = parse(
        "2 qid:1 1:1\n0 qid:1 1:2\n1 qid:2 1:1\n3 qid:2 1:4\n");
    const LossSpec spec{LossVariant::kListwiseSoftRankMse, 0.3};
    const TargetRanks targets = make_target_ranks(ds, spec);
    // Scores equal to labels reproduce the target soft ranks exactly.
    const auto residuals = compute_residuals(ds, targets, ds.labels, spec);
    for (double v : residuals) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("shape and target validation") {
    const QueryDataset ds = parse("1 qid:1 1:1\n");
    const LossSpec spec{LossVariant::kListwiseSoftRankMse, 0.3};
    CHECK_THROWS_AS(
        compute_residuals(ds, {}, std::vector<double>{0.0, 1.0}, spec),
        InvalidInput);
    CHECK_THROWS_AS(compute_residuals(ds, {}, std::vector<double>{0.0}, spec),
                    InvalidInput);
    CHECK_THROWS_AS(validate(LossSpec{LossVariant::kListwiseSoftRankMse, 0.0}),
                    InvalidParameter);
  }
}

TEST_CASE("residuals are the negative finite-difference gradients") {
  Rng rng(77);
  SynthConfig config;
  config.queries = 4;
  config.docs_per_query = 6;
  config.num_features = 3;
  config.seed = 1234;
  const QueryDataset ds = make_synth_dataset(config);

  const LossVariant variants[] = {
      LossVariant::kPointwiseMse, LossVariant::kListwiseMse,
      LossVariant::kPointwiseSoftRankMse, LossVariant::kListwiseSoftRankMse};

  for (LossVariant variant : variants) {
    const LossSpec spec{variant, 0.7};
    const TargetRanks targets = make_target_ranks(ds, spec);
    int tested = 0;
    for (int rep = 0; rep < 40 && tested < 10; ++rep) {
      const std::vector<double> scores = rng.vector(ds.num_docs(), -1.5, 1.5);
      if (spec.uses_soft_rank()) {
        // Keep clear of pooling boundaries so the FD step is smooth.
        bool stable = true;
        auto check_block_gaps = [&](std::span<const double> slice) {
          const auto result = soft_rank(slice, spec.epsilon);
          for (std::size_t b = 0; b + 1 < result.blocks.num_blocks(); ++b) {
            if (result.blocks.means[b] - result.blocks.means[b + 1] < 1e-3) {
              stable = false;
            }
          }
        };
        if (variant == LossVariant::kPointwiseSoftRankMse) {
          check_block_gaps(scores);
        } else {
          for (std::size_t q = 0; q < ds.num_queries(); ++q) {
            check_block_gaps(
                {scores.data() + ds.query_offsets[q], ds.query_size(q)});
          }
        }
        if (!stable) continue;
      }
      ++tested;
      const auto residuals = compute_residuals(ds, targets, scores, spec);
      const auto fd = fd_gradient(
          [&](const std::vector<double>& point) {
            return objective(ds, targets, point, spec);
          },
          scores, 1e-4);
      std::vector<double> neg_fd(fd);
      for (double& v : neg_fd) v = -v;
      CHECK(rel_error(residuals, neg_fd) <= 1e-5);
    }
    CHECK(tested >= 5);
  }
}

TEST_CASE("listwise softrank residuals sum to zero per query") {
  Rng rng(88);
  SynthConfig config;
  config.queries = 8;
  config.docs_per_query = 11;
  config.num_features = 2;
  config.seed = 55;
  const QueryDataset ds = make_synth_dataset(config);
  const LossSpec spec{LossVariant::kListwiseSoftRankMse, 0.2};
  const TargetRanks targets = make_target_ranks(ds, spec);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> scores = rng.vector(ds.num_docs(), -2.0, 2.0);
    const auto residuals = compute_residuals(ds, targets, scores, spec);
    for (std::size_t q = 0; q < ds.num_queries(); ++q) {
      double sum = 0.0;
      for (std::size_t j = ds.query_offsets[q]; j < ds.query_offsets[q + 1];
           ++j) {
        sum += residuals[j];
      }
      CHECK(std::abs(sum) <= 1e-9);
    }
  }
}

TEST_CASE("permuting documents within a query permutes the residuals") {
  Rng rng(99);
  const QueryDataset ds = parse(
      "0 qid:1 1:1\n3 qid:1 1:2\n1 qid:1 1:3\n2 qid:1 1:4\n"
      "1 qid:2 1:5\n0 qid:2 1:6\n2 qid:2 1:7\n");
  const LossSpec spec{LossVariant::kListwiseSoftRankMse, 0.4};
  const TargetRanks targets = make_target_ranks(ds, spec);
  const std::vector<double> scores = rng.vector(ds.num_docs(), -1.0, 1.0);
  const auto residuals = compute_residuals(ds, targets, scores, spec);

  // Rotate query 1's documents by one position.
  QueryDataset rotated = ds;
  std::vector<double> rotated_scores = scores;
  const std::size_t perm[4] = {1, 2, 3, 0};
  for (std::size_t j = 0; j < 4; ++j) {
    rotated.labels[j] = ds.labels[perm[j]];
    rotated_scores[j] = scores[perm[j]];
    for (std::size_t f = 0; f < ds.num_features(); ++f) {
      rotated.features.values[j * ds.num_features() + f] =
          ds.features.at(perm[j], f);
    }
  }
  const TargetRanks rotated_targets = make_target_ranks(rotated, spec);
  const auto rotated_residuals =
      compute_residuals(rotated, rotated_targets, rotated_scores, spec);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(rotated_residuals[j] == doctest::Approx(residuals[perm[j]]));
  }
  for (std::size_t j = 4; j < ds.num_docs(); ++j) {
    CHECK(rotated_residuals[j] == residuals[j]);
  }
}

TEST_CASE("a small gradient step decreases every loss variant") {
  Rng rng(123);
  SynthConfig config;
  config.queries = 5;
  config.docs_per_query = 7;
  config.num_features = 2;
  config.seed = 10;
  const QueryDataset ds = make_synth_dataset(config);
  const LossVariant variants[] = {
      LossVariant::kPointwiseMse, LossVariant::kListwiseMse,
      LossVariant::kPointwiseSoftRankMse, LossVariant::kListwiseSoftRankMse};
  for (LossVariant variant : variants) {
    const LossSpec spec{variant, 0.5};
    const TargetRanks targets = make_target_ranks(ds, spec);
    for (int rep = 0; rep < 10; ++rep) {
      const std::vector<double> scores = rng.vector(ds.num_docs(), -1.0, 1.0);
      const auto residuals = compute_residuals(ds, targets, scores, spec);
      if (max_abs(residuals) < 1e-9) continue;  // already at a minimum
      std::vector<double> stepped(scores);
      for (std::size_t j = 0; j < stepped.size(); ++j) {
        stepped[j] += 1e-3 * residuals[j];
      }
      CHECK(objective(ds, targets, stepped, spec) <
            objective(ds, targets, scores, spec));
    }
  }
}

TEST_CASE("training_loss mean forms") {
  const QueryDataset ds = parse(
      "1 qid:1 1:1\n0 qid:1 1:2\n"
      "2 qid:2 1:3\n");
  SUBCASE("pointwise mse is the per-document mean") {
    const LossSpec spec{LossVariant::kPointwiseMse, 0.1};
    // ((1)^2 + 0 + (2)^2) / 2 / 3
    CHECK(training_loss(ds, {}, std::vector<double>(3, 0.0), spec) ==
          doctest::Approx((1.0 + 4.0) / 2.0 / 3.0));
  }
  SUBCASE("listwise softrank equals softrank_mse_loss") {
    const LossSpec spec{LossVariant::kListwiseSoftRankMse, 0.25};
    const TargetRanks targets = make_target_ranks(ds, spec);
    const std::vector<double> scores{0.3, -0.1, 0.2};
    std::vector<SoftRankResult> predicted;
    predicted.push_back(soft_rank(std::vector<double>{0.3, -0.1}, 0.25));
    predicted.push_back(soft_rank(std::vector<double>{0.2}, 0.25));
    CHECK(training_loss(ds, targets, scores, spec) ==
          doctest::Approx(softrank_mse_loss(targets, predicted)));
  }
}

TEST_CASE("loss variant names round trip") {
  for (LossVariant v :
       {LossVariant::kPointwiseMse, LossVariant::kListwiseMse,
        LossVariant::kPointwiseSoftRankMse, LossVariant::kListwiseSoftRankMse}) {
    CHECK(variant_from_name(variant_name(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_name("bogus"), InvalidParameter);
}
