#include "authprof/linear.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"
#include "authprof/text.hpp"
#include "authprof/util.hpp"

namespace authprof {

namespace {

// Row-wise softmax with max-shift for stability.
Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - m).exp();
    logits.row(r) /= logits.row(r).sum();
  }
  return logits;
}

}  // namespace

double lr_loss_and_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                        const Eigen::MatrixXd& X, std::span<const int> y, double l2_penalty,
                        Eigen::MatrixXd* grad_w, Eigen::VectorXd* grad_b) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd logits = X * weights.transpose();
  logits.rowwise() += bias.transpose();
  Eigen::MatrixXd probs = softmax_rows(std::move(logits));

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    loss -= std::log(std::max(probs(i, y[static_cast<std::size_t>(i)]), 1e-300));
  }
  loss /= static_cast<double>(n);
  loss += 0.5 * l2_penalty * weights.squaredNorm();

  if (grad_w || grad_b) {
    for (Eigen::Index i = 0; i < n; ++i) probs(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    probs /= static_cast<double>(n);
    if (grad_w) *grad_w = probs.transpose() * X + l2_penalty * weights;
    if (grad_b) *grad_b = probs.colwise().sum().transpose();
  }
  return loss;
}

LrModel lr_fit(const Eigen::MatrixXd& X, std::span<const int> y, const LrConfig& cfg) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ShapeError("lr_fit: rows != labels");
  }
  std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw DegenerateLabelsError("lr_fit needs at least 2 distinct classes, got " +
                                std::to_string(distinct.size()));
  }
  if (cfg.learning_rate <= 0.0 || cfg.batch_size <= 0) {
    throw ConfigError("lr_fit: learning_rate and batch_size must be positive");
  }

  LrModel model;
  model.weights = Eigen::MatrixXd::Zero(kNumClasses, X.cols());
  model.bias = Eigen::VectorXd::Zero(kNumClasses);

  AdamState state_w(kNumClasses, X.cols());
  AdamState state_b(kNumClasses, 1);
  const AdamConfig adam = cfg.adam_shape();

  Rng rng(cfg.seed);
  std::vector<int> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), 0);

  double prev_loss = lr_loss_and_grad(model.weights, model.bias, X, y, cfg.l2_penalty, nullptr, nullptr);
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Eigen::MatrixXd bx(static_cast<Eigen::Index>(end - start), X.cols());
      std::vector<int> by(end - start);
      for (std::size_t k = start; k < end; ++k) {
        bx.row(static_cast<Eigen::Index>(k - start)) = X.row(order[k]);
        by[k - start] = y[static_cast<std::size_t>(order[k])];
      }
      Eigen::MatrixXd gw;
      Eigen::VectorXd gb;
      lr_loss_and_grad(model.weights, model.bias, bx, by, cfg.l2_penalty, &gw, &gb);
      ++t;
      state_w.step(model.weights, gw, adam, t);
      Eigen::Map<Eigen::MatrixXd> bias_mat(model.bias.data(), kNumClasses, 1);
      state_b.step(bias_mat, gb, adam, t);
    }
    const double loss =
        lr_loss_and_grad(model.weights, model.bias, X, y, cfg.l2_penalty, nullptr, nullptr);
    if (std::abs(prev_loss - loss) < cfg.tolerance) break;
    prev_loss = loss;
  }
  return model;
}

Eigen::MatrixXd lr_predict(const LrModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.weights.cols()) {
    throw ShapeError("lr_predict: feature width " + std::to_string(X.cols()) +
                     " != model width " + std::to_string(model.weights.cols()));
  }
  Eigen::MatrixXd logits = X * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  return softmax_rows(std::move(logits));
}

void save_lr_model(const LrModel& model, const std::string& path) {
  auto out = open_output(path);
  out << "authprof-lr 1\n";
  out << model.classes() << ' ' << model.features() << '\n';
  for (int r = 0; r < model.classes(); ++r) {
    for (int c = 0; c < model.features(); ++c) {
      if (c) out << ' ';
      out << format_exact(model.weights(r, c));
    }
    out << '\n';
  }
  for (int r = 0; r < model.classes(); ++r) {
    if (r) out << ' ';
    out << format_exact(model.bias(r));
  }
  out << '\n';
}

LrModel load_lr_model(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2 || split_whitespace(lines[0]) != std::vector<std::string>{"authprof-lr", "1"}) {
    throw FormatError(path + ": not an authprof-lr v1 model file");
  }
  const auto shape = split_whitespace(lines[1]);
  if (shape.size() != 2) throw FormatError(path + ":2: expected '<classes> <features>'");
  const long classes = parse_long(shape[0], path);
  const long features = parse_long(shape[1], path);
  if (lines.size() < static_cast<std::size_t>(classes) + 3) {
    throw FormatError(path + ": truncated model file");
  }
  LrModel model;
  model.weights.resize(classes, features);
  for (long r = 0; r < classes; ++r) {
    const auto row = split_whitespace(lines[static_cast<std::size_t>(r) + 2]);
    if (static_cast<long>(row.size()) != features) {
      throw FormatError(path + ": weight row " + std::to_string(r) + " has wrong width");
    }
    for (long c = 0; c < features; ++c) {
      model.weights(r, c) = parse_double(row[static_cast<std::size_t>(c)], path);
    }
  }
  const auto brow = split_whitespace(lines[static_cast<std::size_t>(classes) + 2]);
  if (static_cast<long>(brow.size()) != classes) throw FormatError(path + ": bad bias row");
  model.bias.resize(classes);
  for (long r = 0; r < classes; ++r) {
    model.bias(r) = parse_double(brow[static_cast<std::size_t>(r)], path);
  }
  return model;
}

}  // namespace authprof
