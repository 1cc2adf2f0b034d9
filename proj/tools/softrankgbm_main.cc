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

// Command line front end: train, predict, evaluate, ablate, synth, stats.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srgbm/data.h"
#include "srgbm/error.h"
#include "srgbm/gbm.h"
#include "srgbm/loss.h"
#include "srgbm/metrics.h"
#include "srgbm/model_io.h"
#include "srgbm/synth.h"

namespace {

using namespace srgbm;

struct TrainFlags {
  std::string train_path;
  std::string valid_path;
  std::string model_path;
  std::string out_path;
  std::string loss_name = "softrank-mse";
  bool regroup = false;
  TrainConfig config;
};

void add_config_options(CLI::App* cmd, TrainFlags* flags) {
  cmd->add_option("--loss", flags->loss_name,
                  "mse | listwise-mse | softrank-mse-pointwise | softrank-mse")
      ->capture_default_str();
  cmd->add_option("--iterations", flags->config.iterations, "Boosting rounds")
      ->capture_default_str();
  cmd->add_option("--learning-rate", flags->config.learning_rate,
                  "Shrinkage per tree")
      ->capture_default_str();
  cmd->add_option("--epsilon", flags->config.epsilon, "Soft-rank sharpness")
      ->capture_default_str();
  cmd->add_option("--leaves", flags->config.num_leaves, "Max leaves per tree")
      ->capture_default_str();
  cmd->add_option("--max-bins", flags->config.max_bins,
                  "Histogram bins per feature")
      ->capture_default_str();
  cmd->add_option("--min-samples-leaf", flags->config.min_samples_per_leaf,
                  "Minimum documents per leaf")
      ->capture_default_str();
  cmd->add_option("--k", flags->config.eval_ks,
                  "Truncation level (repeatable; default 1 10)");
  cmd->add_option("--seed", flags->config.seed, "Run seed, echoed in outputs")
      ->capture_default_str();
  cmd->add_option("--threads", flags->config.threads,
                  "Worker threads (0 = runtime default)")
      ->capture_default_str();
  cmd->add_option("--eval-every", flags->config.eval_every,
                  "Validation metric cadence on the learning curve")
      ->capture_default_str();
  cmd->add_flag("--regroup", flags->regroup,
                "Gather non-contiguous qid groups instead of failing");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Loads train (and optional validation) data and aligns feature widths to
// the max seen in either file.
std::pair<QueryDataset, QueryDataset> load_train_valid(const TrainFlags& flags) {
  ParseOptions opts;
  opts.allow_regroup = flags.regroup;
  QueryDataset train_set = parse_letor_file(flags.train_path, opts);
  QueryDataset valid_set;
  if (!flags.valid_path.empty()) {
    valid_set = parse_letor_file(flags.valid_path, opts);
    const std::size_t width =
        std::max(train_set.num_features(), valid_set.num_features());
    pad_features(train_set, width);
    pad_features(valid_set, width);
  }
  return {std::move(train_set), std::move(valid_set)};
}

std::vector<double> read_score_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score file '" + path + "'");
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw ParseError("score file '" + path + "' line " +
                       std::to_string(line_no) + ": malformed value '" + line +
                       "'");
    }
    scores.push_back(v);
  }
  return scores;
}

std::string format_scores(const std::vector<double>& scores) {
  std::string out;
  out.reserve(scores.size() * 26);
  char buf[40];
  for (double v : scores) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out += buf;
  }
  return out;
}

int cmd_train(const TrainFlags& flags) {
  auto [train_set, valid_set] = load_train_valid(flags);
  TrainConfig config = flags.config;
  config.loss = variant_from_name(flags.loss_name);

  const QueryDataset* valid =
      flags.valid_path.empty() ? nullptr : &valid_set;
  TrainResult result = train(train_set, config, valid);

  save_model_file(result.model, flags.model_path);
  const std::string curve_path =
      flags.out_path.empty() ? flags.model_path + ".curve" : flags.out_path;
  write_text_file(curve_path, format_curve(result.curve));

  if (valid != nullptr) {
    const std::vector<double> scores = result.model.predict(valid->features);
    const EvalReport report = evaluate(*valid, scores, config.eval_ks);
    std::cout << format_report(report);
  }
  std::cerr << "model written to " << flags.model_path << ", curve to "
            << curve_path << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool regroup) {
  const TreeEnsemble model = load_model_file(model_path);
  ParseOptions opts;
  opts.allow_regroup = regroup;
  QueryDataset data = parse_letor_file(data_path, opts);
  if (data.num_features() > model.num_features) {
    throw InvalidInput("feature dimension mismatch: model expects " +
                       std::to_string(model.num_features) + ", data has " +
                       std::to_string(data.num_features()));
  }
  pad_features(data, model.num_features);
  const std::vector<double> scores = model.predict(data.features);
  write_text_file(out_path, format_scores(scores));
  return 0;
}

int cmd_evaluate(const std::string& data_path, const std::string& score_path,
                 const std::vector<std::size_t>& ks, const std::string& out_path,
                 bool per_query, bool regroup) {
  ParseOptions opts;
  opts.allow_regroup = regroup;
  const QueryDataset data = parse_letor_file(data_path, opts);
  const std::vector<double> scores = read_score_file(score_path);
  if (scores.size() != data.num_docs()) {
    throw InvalidInput("score count mismatch: dataset has " +
                       std::to_string(data.num_docs()) + " documents, '" +
                       score_path + "' has " + std::to_string(scores.size()) +
                       " scores");
  }
  const EvalReport report = evaluate(data, scores, ks);
  const std::string text = format_report(report, &data, per_query);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cout << format_report(report);
  }
  return 0;
}

int cmd_ablate(const TrainFlags& flags) {
  if (flags.valid_path.empty()) {
    throw InvalidParameter("ablate: --valid is required");
  }
  auto [train_set, valid_set] = load_train_valid(flags);

  // Table rows in ablation order: plain GBRT, GBRT with the soft-rank loss on
  // the pooled set, query-normalized squared loss, and the full method.
  const LossVariant variants[] = {
      LossVariant::kPointwiseMse,
      LossVariant::kPointwiseSoftRankMse,
      LossVariant::kListwiseMse,
      LossVariant::kListwiseSoftRankMse,
  };

  std::string table = "variant";
  for (const char* metric : {"ndcg", "map"}) {
    for (std::size_t k : flags.config.eval_ks) {
      table += '\t';
      table += metric;
      table += '@';
      table += std::to_string(k);
    }
  }
  table += '\n';

  char buf[40];
  for (LossVariant variant : variants) {
    TrainConfig config = flags.config;
    config.loss = variant;
    TrainResult result = train(train_set, config, nullptr);
    const std::vector<double> scores = result.model.predict(valid_set.features);
    const EvalReport report = evaluate(valid_set, scores, config.eval_ks);
    table += variant_name(variant);
    for (const auto& entry : report.entries) {
      std::snprintf(buf, sizeof(buf), "%.6f", entry.mean);
      table += '\t';
      table += buf;
    }
    table += '\n';
    std::cerr << "ablation: finished " << variant_name(variant) << "\n";
  }

  std::cout << table;
  if (!flags.out_path.empty()) write_text_file(flags.out_path, table);
  return 0;
}

int cmd_synth(const SynthConfig& config, const std::string& out_path) {
  const QueryDataset ds = make_synth_dataset(config);
  write_letor_file(ds, out_path);
  std::cerr << "wrote " << ds.num_docs() << " documents in "
            << ds.num_queries() << " queries to " << out_path << "\n";
  return 0;
}

int cmd_stats(const std::string& data_path, bool regroup) {
  ParseOptions opts;
  opts.allow_regroup = regroup;
  const QueryDataset data = parse_letor_file(data_path, opts);
  std::cout << format_stats(dataset_stats(data));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SoftRankGBM: listwise learning-to-rank with gradient-boosted "
               "trees and a differentiable soft-rank loss"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train a ranking model");
  train_cmd->add_option("--train", train_flags.train_path, "Training LETOR file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--valid", train_flags.valid_path,
                        "Validation LETOR file (enables curve metrics)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--model", train_flags.model_path, "Model output path")
      ->required();
  train_cmd
      ->add_option("--out", train_flags.out_path,
                   "Learning-curve output path (default <model>.curve)");
  add_config_options(train_cmd, &train_flags);

  std::string predict_model, predict_data, predict_out;
  bool predict_regroup = false;
  auto* predict_cmd = app.add_subcommand("predict", "Score a LETOR file");
  predict_cmd->add_option("--model", predict_model, "Model path")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--test", predict_data, "Data to score")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_out, "Score file (one per line)")
      ->required();
  predict_cmd->add_flag("--regroup", predict_regroup,
                        "Gather non-contiguous qid groups");

  std::string eval_data, eval_scores, eval_out;
  std::vector<std::size_t> eval_ks;
  bool eval_per_query = false;
  bool eval_regroup = false;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "NDCG/MAP report for a score file");
  eval_cmd->add_option("--test", eval_data, "LETOR file with labels")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--scores", eval_scores, "Score file, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", eval_ks, "Truncation level (repeatable)");
  eval_cmd->add_option("--out", eval_out, "Report path (default stdout)");
  eval_cmd->add_flag("--per-query", eval_per_query, "Append per-query values");
  eval_cmd->add_flag("--regroup", eval_regroup,
                     "Gather non-contiguous qid groups");

  TrainFlags ablate_flags;
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "Train all four loss variants and tabulate their metrics");
  ablate_cmd->add_option("--train", ablate_flags.train_path, "Training LETOR file")
      ->required()
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--valid", ablate_flags.valid_path,
                         "Validation LETOR file")
      ->required()
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--out", ablate_flags.out_path, "Report output path");
  add_config_options(ablate_cmd, &ablate_flags);

  SynthConfig synth_config;
  std::string synth_out;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic LETOR dataset");
  synth_cmd->add_option("--queries", synth_config.queries, "Number of queries")
      ->capture_default_str();
  synth_cmd->add_option("--docs", synth_config.docs_per_query,
                        "Documents per query")
      ->capture_default_str();
  synth_cmd->add_option("--features", synth_config.num_features,
                        "Feature count")
      ->capture_default_str();
  synth_cmd->add_option("--levels", synth_config.num_levels,
                        "Relevance grades")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth_config.noise, "Label noise stddev")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_config.seed, "Generator seed")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output LETOR path")->required();

  std::string stats_data;
  bool stats_regroup = false;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a LETOR dataset");
  stats_cmd->add_option("--test", stats_data, "LETOR file")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_flag("--regroup", stats_regroup,
                      "Gather non-contiguous qid groups");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      if (train_flags.config.eval_ks.empty()) {
        train_flags.config.eval_ks = {1, 10};
      }
      return cmd_train(train_flags);
    }
    if (predict_cmd->parsed()) {
      return cmd_predict(predict_model, predict_data, predict_out,
                         predict_regroup);
    }
    if (eval_cmd->parsed()) {
      if (eval_ks.empty()) eval_ks = {1, 10};
      return cmd_evaluate(eval_data, eval_scores, eval_ks, eval_out,
                          eval_per_query, eval_regroup);
    }
    if (ablate_cmd->parsed()) {
      if (ablate_flags.config.eval_ks.empty()) {
        ablate_flags.config.eval_ks = {1, 10};
      }
      return cmd_ablate(ablate_flags);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(synth_config, synth_out);
    }
    if (stats_cmd->parsed()) {
      return cmd_stats(stats_data, stats_regroup);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
