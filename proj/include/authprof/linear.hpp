#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "authprof/features.hpp"
#include "authprof/optimize.hpp"

namespace authprof {

struct LrConfig {
  double l2_penalty = 1e-4;
  int epochs = 100;
  double learning_rate = 0.05;  // Adam step size
  int batch_size = 64;
  std::uint64_t seed = 1;
  double tolerance = 1e-7;  // stop when the full-train loss delta drops below this
  AdamConfig adam_shape() const { return {learning_rate, 0.9, 0.999, 1e-8}; }
};

/// Multinomial logistic regression: softmax(W x + b).
struct LrModel {
  Eigen::MatrixXd weights;  // classes x features
  Eigen::VectorXd bias;     // classes
  int classes() const { return static_cast<int>(weights.rows()); }
  int features() const { return static_cast<int>(weights.cols()); }
};

/// Mean cross-entropy + (l2/2)|W|^2 and its gradients; the exact objective
/// lr_fit minimizes (biases are not penalized).
double lr_loss_and_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const Eigen::MatrixXd& X, std::span<const int> y, double l2_penalty,
                        Eigen::MatrixXd* grad_w, Eigen::VectorXd* grad_b);

/// Minimizes the objective with mini-batch Adam from a zero start.
/// Deterministic given the seed. Throws DegenerateLabelsError when fewer
/// than 2 classes are present.
LrModel lr_fit(const Eigen::MatrixXd& X, std::span<const int> y, const LrConfig& cfg);

/// Row-wise class probabilities. Throws ShapeError on width mismatch.
Eigen::MatrixXd lr_predict(const LrModel& model, const Eigen::MatrixXd& X);

void save_lr_model(const LrModel& model, const std::string& path);
LrModel load_lr_model(const std::string& path);

}  // namespace authprof
