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
#include "srgbm/model_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "srgbm/error.h"

namespace srgbm {

namespace {

constexpr char kMagic[] = "softrankgbm model v1";

std::string real_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Reader {
  std::istream& in;
  std::size_t line_no = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("model file line " + std::to_string(line_no) + ": " + what);
  }
};

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> out;
  std::string tok;
  while (stream >> tok) out.push_back(tok);
  return out;
}

double to_real(const Reader& r, const std::string& tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    r.fail("malformed real '" + tok + "'");
  }
  return v;
}

long long to_int(const Reader& r, const std::string& tok) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    r.fail("malformed integer '" + tok + "'");
  }
  return v;
}

std::uint64_t to_uint(const Reader& r, const std::string& tok) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    r.fail("malformed unsigned integer '" + tok + "'");
  }
  return v;
}

}  // namespace

void save_model(const TreeEnsemble& model, std::ostream& out) {
  const TrainConfig& cfg = model.config;
  out << kMagic << '\n'
      << "loss " << variant_name(cfg.loss) << '\n'
      << "epsilon " << real_str(cfg.epsilon) << '\n'
      << "learning_rate " << real_str(model.learning_rate) << '\n'
      << "iterations " << cfg.iterations << '\n'
      << "num_leaves " << cfg.num_leaves << '\n'
      << "max_bins " << cfg.max_bins << '\n'
      << "min_samples_per_leaf " << cfg.min_samples_per_leaf << '\n'
      << "seed " << cfg.seed << '\n'
      << "num_features " << model.num_features << '\n'
      << "base_score " << real_str(model.base_score) << '\n'
      << "num_trees " << model.trees.size() << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& tree = model.trees[t];
    out << "tree " << t << " nodes " << tree.nodes.size() << '\n';
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& node = tree.nodes[i];
      if (node.is_leaf()) {
        out << i << " leaf " << real_str(node.value) << '\n';
      } else {
        out << i << " split " << node.feature << ' '
            << real_str(node.threshold) << ' ' << node.left << ' '
            << node.right << '\n';
      }
    }
  }
  out << "end\n";
}

void save_model_file(const TreeEnsemble& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file '" + path + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("failed writing model to '" + path + "'");
}

TreeEnsemble load_model(std::istream& in) {
  Reader r{in};
  if (!r.next() || r.line != kMagic) {
    throw IoError("model file: missing or unsupported header (expected '" +
                  std::string(kMagic) + "')");
  }

  TreeEnsemble model;
  TrainConfig& cfg = model.config;
  std::size_t num_trees = 0;

  auto expect_kv = [&](const char* key) -> std::string {
    if (!r.next()) r.fail(std::string("unexpected end, wanted '") + key + "'");
    const auto toks = tokens(r.line);
    if (toks.size() != 2 || toks[0] != key) {
      r.fail(std::string("expected '") + key + " <value>'");
    }
    return toks[1];
  };

  cfg.loss = variant_from_name(expect_kv("loss"));
  cfg.epsilon = to_real(r, expect_kv("epsilon"));
  model.learning_rate = to_real(r, expect_kv("learning_rate"));
  cfg.learning_rate = model.learning_rate;
  cfg.iterations = static_cast<int>(to_int(r, expect_kv("iterations")));
  cfg.num_leaves = static_cast<int>(to_int(r, expect_kv("num_leaves")));
  cfg.max_bins = static_cast<int>(to_int(r, expect_kv("max_bins")));
  cfg.min_samples_per_leaf =
      static_cast<int>(to_int(r, expect_kv("min_samples_per_leaf")));
  cfg.seed = to_uint(r, expect_kv("seed"));
  model.num_features =
      static_cast<std::size_t>(to_int(r, expect_kv("num_features")));
  model.base_score = to_real(r, expect_kv("base_score"));
  num_trees = static_cast<std::size_t>(to_int(r, expect_kv("num_trees")));

  model.trees.reserve(num_trees);
  for (std::size_t t = 0; t < num_trees; ++t) {
    if (!r.next()) r.fail("unexpected end, wanted tree header");
    auto toks = tokens(r.line);
    if (toks.size() != 4 || toks[0] != "tree" || toks[2] != "nodes") {
      r.fail("expected 'tree <index> nodes <count>'");
    }
    if (static_cast<std::size_t>(to_int(r, toks[1])) != t) {
      r.fail("tree index out of order");
    }
    const std::size_t num_nodes =
        static_cast<std::size_t>(to_int(r, toks[3]));
    if (num_nodes == 0) r.fail("tree with zero nodes");

    RegressionTree tree;
    tree.nodes.resize(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      if (!r.next()) r.fail("unexpected end, wanted node line");
      toks = tokens(r.line);
      if (toks.size() < 3 ||
          static_cast<std::size_t>(to_int(r, toks[0])) != i) {
        r.fail("expected node " + std::to_string(i));
      }
      TreeNode& node = tree.nodes[i];
      if (toks[1] == "leaf" && toks.size() == 3) {
        node.value = to_real(r, toks[2]);
      } else if (toks[1] == "split" && toks.size() == 6) {
        node.feature = static_cast<int>(to_int(r, toks[2]));
        node.threshold = to_real(r, toks[3]);
        node.left = static_cast<int>(to_int(r, toks[4]));
        node.right = static_cast<int>(to_int(r, toks[5]));
        if (node.feature < 0 ||
            static_cast<std::size_t>(node.feature) >= model.num_features) {
          r.fail("split feature index out of range");
        }
        if (node.left <= 0 || node.right <= 0 ||
            static_cast<std::size_t>(node.left) >= num_nodes ||
            static_cast<std::size_t>(node.right) >= num_nodes) {
          r.fail("child index out of range");
        }
        if (!std::isfinite(node.threshold)) r.fail("non-finite threshold");
      } else {
        r.fail("expected '<id> leaf <value>' or "
               "'<id> split <feature> <threshold> <left> <right>'");
      }
    }
    model.trees.push_back(std::move(tree));
  }
  if (!r.next() || r.line != "end") {
    r.fail("missing 'end' marker");
  }
  return model;
}

TreeEnsemble load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace srgbm
