#include "authprof/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/eval.hpp"
#include "authprof/rng.hpp"
#include "authprof/util.hpp"

namespace authprof {

namespace {

// Scalar softmax in fixed order; the training loop and the checked-in
// reference script (scripts/gbdt_reference.py) must agree bit for bit.
void softmax3(const double* scores, double* out) {
  double m = scores[0];
  for (int c = 1; c < 3; ++c) {
    if (scores[c] > m) m = scores[c];
  }
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::exp(scores[c] - m);
    total += out[c];
  }
  for (int c = 0; c < 3; ++c) out[c] /= total;
}

double multiclass_log_loss(const Eigen::MatrixXd& F, std::span<const int> y) {
  double acc = 0.0;
  double p[3];
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    softmax3(F.row(i).data(), p);
    acc += -std::log(std::max(p[y[static_cast<std::size_t>(i)]], 1e-300));
  }
  return acc / static_cast<double>(F.rows());
}

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const std::vector<double>& g;
  const std::vector<double>& h;
  const GbdtConfig& cfg;
  const std::vector<int>& features;  // candidate columns, ascending
  RegressionTree tree;

  int build(std::vector<int> rows, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double G = 0.0, H = 0.0;
    for (const int r : rows) G += g[static_cast<std::size_t>(r)];
    for (const int r : rows) H += h[static_cast<std::size_t>(r)];

    if (depth >= cfg.max_depth || rows.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf)) {
      tree.nodes[static_cast<std::size_t>(node_id)].value =
          -cfg.learning_rate * G / (H + cfg.l2_leaf_reg);
      return node_id;
    }

    const double parent_score = G * G / (H + cfg.l2_leaf_reg);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<int> order;
    for (const int f : features) {
      order = rows;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
        return a < b;
      });
      double GL = 0.0, HL = 0.0;
      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const int r = order[pos];
        GL += g[static_cast<std::size_t>(r)];
        HL += h[static_cast<std::size_t>(r)];
        if (X(order[pos], f) == X(order[pos + 1], f)) continue;
        const std::size_t n_left = pos + 1;
        const std::size_t n_right = order.size() - n_left;
        if (n_left < static_cast<std::size_t>(cfg.min_samples_leaf) ||
            n_right < static_cast<std::size_t>(cfg.min_samples_leaf)) {
          continue;
        }
        const double GR = G - GL;
        const double HR = H - HL;
        const double gain = GL * GL / (HL + cfg.l2_leaf_reg) + GR * GR / (HR + cfg.l2_leaf_reg) -
                            parent_score;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = (X(order[pos], f) + X(order[pos + 1], f)) / 2.0;
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[static_cast<std::size_t>(node_id)].value =
          -cfg.learning_rate * G / (H + cfg.l2_leaf_reg);
      return node_id;
    }

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (const int r : rows) {
      (X(r, best_feature) < best_threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
    const int left_id = build(std::move(left_rows), depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
    const int right_id = build(std::move(right_rows), depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
    return node_id;
  }
};

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int n = 0;
  while (!nodes[static_cast<std::size_t>(n)].is_leaf()) {
    const auto& node = nodes[static_cast<std::size_t>(n)];
    n = row[node.feature] < node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(n)].value;
}

GbdtModel gbdt_fit(const Eigen::MatrixXd& X, std::span<const int> y, const GbdtConfig& cfg) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("gbdt_fit: rows != labels");
  if (cfg.rounds < 0 || cfg.max_depth < 1 || cfg.min_samples_leaf < 1 || cfg.learning_rate <= 0.0 ||
      cfg.l2_leaf_reg < 0.0 || cfg.feature_subsample <= 0.0 || cfg.feature_subsample > 1.0) {
    throw ConfigError("gbdt_fit: invalid hyperparameters");
  }
  std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw DegenerateLabelsError("gbdt_fit needs at least 2 distinct classes");
  }

  const Eigen::Index n = X.rows();
  GbdtModel model;
  model.n_features = static_cast<int>(X.cols());
  for (int c = 0; c < 3; ++c) {
    long count = 0;
    for (const int label : y) {
      if (label == c) ++count;
    }
    model.base_score[static_cast<std::size_t>(c)] =
        std::log(std::max(static_cast<double>(count) / static_cast<double>(n), 1e-12));
  }

  Eigen::MatrixXd F(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) F(i, c) = model.base_score[static_cast<std::size_t>(c)];
  }
  model.training_loss.push_back(multiclass_log_loss(F, y));

  Rng rng(cfg.seed);
  std::vector<int> all_features(static_cast<std::size_t>(X.cols()));
  std::iota(all_features.begin(), all_features.end(), 0);

  std::vector<double> g(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
  std::vector<int> all_rows(static_cast<std::size_t>(n));
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (int round = 0; round < cfg.rounds; ++round) {
    auto& round_trees = model.rounds.emplace_back();
    for (int c = 0; c < 3; ++c) {
      double p[3];
      for (Eigen::Index i = 0; i < n; ++i) {
        softmax3(F.row(i).data(), p);
        g[static_cast<std::size_t>(i)] = p[c] - (y[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
        h[static_cast<std::size_t>(i)] = p[c] * (1.0 - p[c]);
      }
      std::vector<int> features = all_features;
      if (cfg.feature_subsample < 1.0) {
        const auto m = static_cast<std::size_t>(
            std::max(1.0, std::ceil(cfg.feature_subsample * static_cast<double>(X.cols()))));
        rng.shuffle(features);
        features.resize(std::min(m, features.size()));
        std::sort(features.begin(), features.end());
      }
      TreeBuilder builder{X, g, h, cfg, features, {}};
      builder.build(all_rows, 0);
      round_trees[static_cast<std::size_t>(c)] = std::move(builder.tree);
      for (Eigen::Index i = 0; i < n; ++i) {
        F(i, c) += round_trees[static_cast<std::size_t>(c)].predict(X.row(i));
      }
    }
    model.training_loss.push_back(multiclass_log_loss(F, y));
  }
  return model;
}

Eigen::MatrixXd GbdtModel::predict_proba(const Eigen::MatrixXd& X) const {
  if (static_cast<int>(X.cols()) != n_features) {
    throw ShapeError("gbdt predict: feature width " + std::to_string(X.cols()) + " != model width " +
                     std::to_string(n_features));
  }
  Eigen::MatrixXd probs(X.rows(), 3);
  double scores[3];
  double p[3];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int c = 0; c < 3; ++c) scores[c] = base_score[static_cast<std::size_t>(c)];
    for (const auto& round_trees : rounds) {
      for (int c = 0; c < 3; ++c) scores[c] += round_trees[static_cast<std::size_t>(c)].predict(X.row(i));
    }
    softmax3(scores, p);
    for (int c = 0; c < 3; ++c) probs(i, c) = p[c];
  }
  return probs;
}

GbdtConfig gbdt_grid_search(const Eigen::MatrixXd& X, std::span<const int> y,
                            std::span<const GbdtConfig> grid, int folds, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("gbdt_grid_search: empty grid");
  if (grid.size() == 1) return grid[0];

  std::vector<Label> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) labels[i] = static_cast<Label>(y[i]);
  const FoldPlan plan = make_folds(labels, folds, derive_seed(seed, 0x67726964ULL));  // "grid"
  const std::array<double, 3> weights = class_proportions(labels);

  double best_score = -1.0;
  std::size_t best_index = 0;
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    double mean_f1 = 0.0;
    for (int f = 0; f < folds; ++f) {
      const auto train_ix = plan.train_indices(f);
      const auto& val_ix = plan.test_indices(f);
      Eigen::MatrixXd tx(static_cast<Eigen::Index>(train_ix.size()), X.cols());
      std::vector<int> ty(train_ix.size());
      for (std::size_t i = 0; i < train_ix.size(); ++i) {
        tx.row(static_cast<Eigen::Index>(i)) = X.row(train_ix[i]);
        ty[i] = y[static_cast<std::size_t>(train_ix[i])];
      }
      GbdtConfig fit_cfg = grid[ci];
      fit_cfg.seed = derive_seed(grid[ci].seed, static_cast<std::uint64_t>(f));
      const GbdtModel model = gbdt_fit(tx, ty, fit_cfg);

      Eigen::MatrixXd vx(static_cast<Eigen::Index>(val_ix.size()), X.cols());
      std::vector<Label> gold(val_ix.size());
      for (std::size_t i = 0; i < val_ix.size(); ++i) {
        vx.row(static_cast<Eigen::Index>(i)) = X.row(val_ix[i]);
        gold[i] = labels[static_cast<std::size_t>(val_ix[i])];
      }
      const Eigen::MatrixXd probs = model.predict_proba(vx);
      std::vector<Label> pred(val_ix.size());
      for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        Eigen::Index arg = 0;
        probs.row(i).maxCoeff(&arg);
        pred[static_cast<std::size_t>(i)] = static_cast<Label>(arg);
      }
      std::array<double, 3> f1s{};
      for (int c = 0; c < kNumClasses; ++c) {
        f1s[static_cast<std::size_t>(c)] = class_metrics(pred, gold, static_cast<Label>(c)).f1;
      }
      mean_f1 += weighted_metric(f1s, weights);
    }
    mean_f1 /= static_cast<double>(folds);
    const bool better =
        mean_f1 > best_score ||
        (mean_f1 == best_score &&
         (grid[ci].rounds < grid[best_index].rounds ||
          (grid[ci].rounds == grid[best_index].rounds && grid[ci].max_depth < grid[best_index].max_depth)));
    if (better) {
      best_score = mean_f1;
      best_index = ci;
    }
  }
  return grid[best_index];
}

namespace {

void write_tree_preorder(std::ofstream& out, const RegressionTree& tree, int node_id) {
  const auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
  if (node.is_leaf()) {
    out << "leaf " << format_exact(node.value) << '\n';
    return;
  }
  out << node.feature << ' ' << format_exact(node.threshold) << '\n';
  write_tree_preorder(out, tree, node.left);
  write_tree_preorder(out, tree, node.right);
}

int read_tree_preorder(const std::vector<std::string>& lines, std::size_t& pos,
                       RegressionTree& tree, const std::string& path) {
  if (pos >= lines.size()) throw FormatError(path + ": truncated tree");
  const auto fields = split_whitespace(lines[pos]);
  ++pos;
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (fields.size() == 2 && fields[0] == "leaf") {
    tree.nodes[static_cast<std::size_t>(node_id)].value = parse_double(fields[1], path);
    return node_id;
  }
  if (fields.size() != 2) throw FormatError(path + ": bad tree node at line " + std::to_string(pos));
  tree.nodes[static_cast<std::size_t>(node_id)].feature = static_cast<int>(parse_long(fields[0], path));
  tree.nodes[static_cast<std::size_t>(node_id)].threshold = parse_double(fields[1], path);
  const int left = read_tree_preorder(lines, pos, tree, path);
  tree.nodes[static_cast<std::size_t>(node_id)].left = left;
  const int right = read_tree_preorder(lines, pos, tree, path);
  tree.nodes[static_cast<std::size_t>(node_id)].right = right;
  return node_id;
}

}  // namespace

void save_gbdt_model(const GbdtModel& model, const std::string& path) {
  auto out = open_output(path);
  out << "authprof-gbdt 1\n";
  out << model.n_features << ' ' << model.rounds.size() << '\n';
  for (int c = 0; c < 3; ++c) {
    if (c) out << ' ';
    out << format_exact(model.base_score[static_cast<std::size_t>(c)]);
  }
  out << '\n';
  for (const auto& round_trees : model.rounds) {
    for (const auto& tree : round_trees) {
      out << "tree\n";
      write_tree_preorder(out, tree, 0);
    }
  }
}

GbdtModel load_gbdt_model(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 3 || split_whitespace(lines[0]) != std::vector<std::string>{"authprof-gbdt", "1"}) {
    throw FormatError(path + ": not an authprof-gbdt v1 model file");
  }
  const auto shape = split_whitespace(lines[1]);
  if (shape.size() != 2) throw FormatError(path + ":2: expected '<features> <rounds>'");
  GbdtModel model;
  model.n_features = static_cast<int>(parse_long(shape[0], path));
  const long rounds = parse_long(shape[1], path);
  const auto base = split_whitespace(lines[2]);
  if (base.size() != 3) throw FormatError(path + ":3: expected three base scores");
  for (int c = 0; c < 3; ++c) {
    model.base_score[static_cast<std::size_t>(c)] = parse_double(base[static_cast<std::size_t>(c)], path);
  }
  std::size_t pos = 3;
  for (long r = 0; r < rounds; ++r) {
    auto& round_trees = model.rounds.emplace_back();
    for (int c = 0; c < 3; ++c) {
      if (pos >= lines.size() || strip(lines[pos]) != "tree") {
        throw FormatError(path + ": expected 'tree' separator at line " + std::to_string(pos + 1));
      }
      ++pos;
      read_tree_preorder(lines, pos, round_trees[static_cast<std::size_t>(c)], path);
    }
  }
  return model;
}

}  // namespace authprof
