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

// End-to-end checks of the installed command line binary (path in SRGBM_CLI).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("SRGBM_CLI");
  REQUIRE_MESSAGE(env != nullptr, "SRGBM_CLI must point at the binary");
  return env;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("srgbm_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log_name = "log") {
  const fs::path log = work_dir() / log_name;
  const std::string cmd =
      cli_path() + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string synth_file(const std::string& name, const std::string& args) {
  const fs::path path = work_dir() / name;
  if (!fs::exists(path)) {
    REQUIRE(run("synth --out " + path.string() + " " + args) == 0);
  }
  return path.string();
}

}  // namespace

TEST_CASE("synth is deterministic and parseable") {
  const fs::path a = work_dir() / "synth_a.letor";
  const fs::path b = work_dir() / "synth_b.letor";
  REQUIRE(run("synth --out " + a.string() +
              " --queries 4 --docs 6 --features 3 --seed 11") == 0);
  REQUIRE(run("synth --out " + b.string() +
              " --queries 4 --docs 6 --features 3 --seed 11") == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(lines_of(read_file(a)).size() == 24);

  REQUIRE(run("stats --test " + a.string(), "stats_log") == 0);
  const std::string stats = read_file(work_dir() / "stats_log");
  CHECK(stats.find("queries\t4") != std::string::npos);
  CHECK(stats.find("documents\t24") != std::string::npos);
}

TEST_CASE("train records defaults in the model header") {
  const std::string data = synth_file(
      "tiny.letor", "--queries 4 --docs 6 --features 3 --seed 21");
  const fs::path model = work_dir() / "defaults.model";
  REQUIRE(run("train --train " + data + " --model " + model.string()) == 0);
  const std::string text = read_file(model);
  CHECK(text.find("softrankgbm model v1") == 0);
  CHECK(text.find("loss softrank-mse\n") != std::string::npos);
  CHECK(text.find("epsilon 0.01") != std::string::npos);
  CHECK(text.find("learning_rate 0.1") != std::string::npos);
  CHECK(text.find("iterations 1000") != std::string::npos);
  CHECK(text.find("num_leaves 255") != std::string::npos);
  CHECK(fs::exists(model.string() + ".curve"));
}

TEST_CASE("missing train file fails with no partial outputs") {
  const fs::path model = work_dir() / "never.model";
  CHECK(run("train --train " + (work_dir() / "no_such.letor").string() +
            " --model " + model.string()) != 0);
  CHECK(!fs::exists(model));
}

TEST_CASE("train, predict and evaluate round trip") {
  const std::string train = synth_file(
      "trainset.letor", "--queries 20 --docs 10 --features 4 --seed 3");
  const std::string valid = synth_file(
      "validset.letor", "--queries 8 --docs 10 --features 4 --seed 4");
  const fs::path model = work_dir() / "roundtrip.model";
  const fs::path curve = work_dir() / "roundtrip.curve";

  REQUIRE(run("train --train " + train + " --valid " + valid + " --model " +
              model.string() + " --out " + curve.string() +
              " --iterations 40 --leaves 15 --epsilon 0.1 --k 1 --k 10",
              "train_log") == 0);

  const auto curve_lines = lines_of(read_file(curve));
  REQUIRE(curve_lines.size() == 41);  // header + one row per iteration
  CHECK(curve_lines[0] ==
        "iteration\ttrain_loss\tndcg@1\tndcg@10\tmap@1\tmap@10");

  // Scores, one per input line, in input order.
  const fs::path scores = work_dir() / "valid.scores";
  REQUIRE(run("predict --model " + model.string() + " --test " + valid +
              " --out " + scores.string()) == 0);
  CHECK(lines_of(read_file(scores)).size() == 80);

  // Prediction is deterministic file-for-file.
  const fs::path scores2 = work_dir() / "valid2.scores";
  REQUIRE(run("predict --model " + model.string() + " --test " + valid +
              " --out " + scores2.string()) == 0);
  CHECK(read_file(scores) == read_file(scores2));

  // The evaluate report on those scores reproduces the final curve row.
  const fs::path report = work_dir() / "valid.report";
  REQUIRE(run("evaluate --test " + valid + " --scores " + scores.string() +
              " --k 1 --k 10 --out " + report.string()) == 0);
  const auto report_lines = lines_of(read_file(report));
  REQUIRE(report_lines.size() == 5);  // header + 2 metrics x 2 ks
  CHECK(report_lines[0] == "metric\tk\tmean\tdegenerate\tqueries");

  std::istringstream last_row(curve_lines.back());
  std::string iter, loss, ndcg1, ndcg10, map1, map10;
  last_row >> iter >> loss >> ndcg1 >> ndcg10 >> map1 >> map10;
  auto mean_of = [&](std::size_t row) {
    std::istringstream in(report_lines[row]);
    std::string metric, k, mean;
    in >> metric >> k >> mean;
    return mean;
  };
  CHECK(mean_of(1) == ndcg1);
  CHECK(mean_of(2) == ndcg10);
  CHECK(mean_of(3) == map1);
  CHECK(mean_of(4) == map10);
}

TEST_CASE("evaluate with scores equal to labels is perfect") {
  const std::string data = synth_file(
      "eval.letor", "--queries 5 --docs 8 --features 2 --seed 9");
  // Build a score file from the label column.
  const fs::path scores = work_dir() / "labels.scores";
  {
    std::ofstream out(scores);
    std::istringstream in(read_file(data));
    std::string line;
    while (std::getline(in, line)) {
      out << line.substr(0, line.find(' ')) << "\n";
    }
  }
  REQUIRE(run("evaluate --test " + data + " --scores " + scores.string() +
              " --k 10 --per-query", "eval_log") == 0);
  const std::string report = read_file(work_dir() / "eval_log");
  CHECK(report.find("ndcg@10\t10\t1.000000\t0\t5") != std::string::npos);

  // Line-count mismatch is an error.
  const fs::path short_scores = work_dir() / "short.scores";
  { std::ofstream out(short_scores); out << "1.0\n"; }
  CHECK(run("evaluate --test " + data + " --scores " + short_scores.string(),
            "eval_err") != 0);
  CHECK(read_file(work_dir() / "eval_err").find("score count mismatch") !=
        std::string::npos);
}

TEST_CASE("evaluate reports zeros on an all-irrelevant dataset") {
  const fs::path data = work_dir() / "degenerate.letor";
  {
    std::ofstream out(data);
    out << "0 qid:1 1:0.3\n0 qid:1 1:0.1\n0 qid:2 1:0.9\n";
  }
  const fs::path scores = work_dir() / "degenerate.scores";
  { std::ofstream out(scores); out << "1\n2\n3\n"; }
  REQUIRE(run("evaluate --test " + data.string() + " --scores " +
              scores.string() + " --k 1", "deg_log") == 0);
  const std::string report = read_file(work_dir() / "deg_log");
  CHECK(report.find("ndcg@1\t1\t0.000000\t2\t2") != std::string::npos);
  CHECK(report.find("map@1\t1\t0.000000\t2\t2") != std::string::npos);
}

TEST_CASE("ablate emits a 4x4 table and is reproducible") {
  const std::string train = synth_file(
      "ab_train.letor", "--queries 12 --docs 8 --features 3 --seed 5");
  const std::string valid = synth_file(
      "ab_valid.letor", "--queries 5 --docs 8 --features 3 --seed 6");
  const fs::path table_a = work_dir() / "ablate_a.tsv";
  const fs::path table_b = work_dir() / "ablate_b.tsv";
  const std::string flags = " --iterations 20 --leaves 7 --epsilon 0.1 "
                            "--seed 42 --k 1 --k 10 --out ";
  REQUIRE(run("ablate --train " + train + " --valid " + valid + flags +
              table_a.string(), "ablate_a_log") == 0);
  REQUIRE(run("ablate --train " + train + " --valid " + valid + flags +
              table_b.string(), "ablate_b_log") == 0);
  CHECK(read_file(table_a) == read_file(table_b));

  const auto rows = lines_of(read_file(table_a));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "variant\tndcg@1\tndcg@10\tmap@1\tmap@10");
  CHECK(rows[1].rfind("mse\t", 0) == 0);
  CHECK(rows[2].rfind("softrank-mse-pointwise\t", 0) == 0);
  CHECK(rows[3].rfind("listwise-mse\t", 0) == 0);
  CHECK(rows[4].rfind("softrank-mse\t", 0) == 0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    CHECK(lines_of(rows[r]).size() == 1);
    std::istringstream in(rows[r]);
    std::string field;
    int fields = 0;
    while (in >> field) ++fields;
    CHECK(fields == 5);
  }
}

TEST_CASE("predict rejects wider data than the model") {
  const std::string narrow = synth_file(
      "narrow.letor", "--queries 3 --docs 5 --features 2 --seed 8");
  const std::string wide = synth_file(
      "wide.letor", "--queries 3 --docs 5 --features 6 --seed 8");
  const fs::path model = work_dir() / "narrow.model";
  REQUIRE(run("train --train " + narrow + " --model " + model.string() +
              " --iterations 3 --leaves 4") == 0);
  CHECK(run("predict --model " + model.string() + " --test " + wide +
            " --out " + (work_dir() / "wide.scores").string(),
            "wide_log") != 0);
  const std::string log = read_file(work_dir() / "wide_log");
  CHECK(log.find("feature dimension mismatch") != std::string::npos);
  CHECK(log.find("2") != std::string::npos);
  CHECK(log.find("6") != std::string::npos);
}

TEST_CASE("training twice with one seed gives identical outputs") {
  const std::string train = synth_file(
      "det_train.letor", "--queries 10 --docs 7 --features 3 --seed 13");
  const fs::path model_a = work_dir() / "det_a.model";
  const fs::path model_b = work_dir() / "det_b.model";
  const std::string flags = " --iterations 15 --leaves 9 --seed 99 --threads ";
  REQUIRE(run("train --train " + train + " --model " + model_a.string() +
              flags + "1") == 0);
  REQUIRE(run("train --train " + train + " --model " + model_b.string() +
              flags + "2") == 0);
  CHECK(read_file(model_a) == read_file(model_b));
  CHECK(read_file(model_a.string() + ".curve") ==
        read_file(model_b.string() + ".curve"));
}
