#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace authprof {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment buffers for one parameter block. The step counter is
/// owned by the caller so several blocks can share one schedule.
class AdamState {
 public:
  AdamState() = default;
  AdamState(Eigen::Index rows, Eigen::Index cols)
      : m_(Eigen::MatrixXd::Zero(rows, cols)), v_(Eigen::MatrixXd::Zero(rows, cols)) {}

  void step(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, const AdamConfig& cfg,
            long t) {
    m_ = cfg.beta1 * m_ + (1.0 - cfg.beta1) * grad;
    v_ = cfg.beta2 * v_ + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const double alpha = cfg.learning_rate / bc1;
    param.noalias() -=
        alpha * (m_.array() / ((v_.array() / bc2).sqrt() + cfg.epsilon)).matrix();
  }

 private:
  Eigen::MatrixXd m_, v_;
};

}  // namespace authprof
