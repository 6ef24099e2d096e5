#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace authprof {

struct GbdtConfig {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 10;
  double l2_leaf_reg = 1.0;
  double feature_subsample = 1.0;  // fraction of features tried per tree
  std::uint64_t seed = 1;
};

/// Axis-aligned split node. feature < 0 marks a leaf; rows go left iff
/// x[feature] < threshold. Leaf values carry the learning-rate factor.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Newton-boosted ensemble with a softmax objective: per round and class,
/// a regression tree fit to g = p - 1{y=c}, h = p(1-p).
struct GbdtModel {
  std::array<double, 3> base_score{};  // prior log-probabilities
  std::vector<std::array<RegressionTree, 3>> rounds;
  int n_features = 0;
  std::vector<double> training_loss;  // log-loss before round 1, then after each round

  /// Row-wise class probabilities. Throws ShapeError on width mismatch.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
};

/// Deterministic given cfg.seed. Throws DegenerateLabelsError with fewer
/// than 2 distinct labels, ConfigError on bad hyperparameters.
GbdtModel gbdt_fit(const Eigen::MatrixXd& X, std::span<const int> y, const GbdtConfig& cfg);

/// Picks the grid entry with the best mean weighted-F1 over an inner
/// stratified `folds`-fold split of (X, y). Ties: smaller rounds, then
/// smaller depth, then grid order.
GbdtConfig gbdt_grid_search(const Eigen::MatrixXd& X, std::span<const int> y,
                            std::span<const GbdtConfig> grid, int folds, std::uint64_t seed);

void save_gbdt_model(const GbdtModel& model, const std::string& path);
GbdtModel load_gbdt_model(const std::string& path);

}  // namespace authprof
