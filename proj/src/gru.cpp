#include "authprof/gru.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "authprof/errors.hpp"
#include "authprof/eval.hpp"
#include "authprof/rng.hpp"
#include "authprof/util.hpp"

namespace authprof {

void GruConfig::validate() const {
  if (hidden_units < 1 || layers < 1) throw ConfigError("gru config: layers and hidden_units must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("gru config: dropout_rate must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("gru config: batch_size must be >= 1");
  if (validation_fraction <= 0.0 || validation_fraction >= 0.5) {
    throw ConfigError("gru config: validation_fraction must be in (0, 0.5)");
  }
  if (epochs < 0 || patience < 1) throw ConfigError("gru config: epochs/patience out of range");
  if (adam.learning_rate <= 0.0) throw ConfigError("gru config: learning rate must be positive");
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
  }
  return m;
}

struct LayerCache {
  std::vector<Eigen::MatrixXd> X;  // layer input per step (after dropout for l >= 1)
  std::vector<Eigen::MatrixXd> Z, R, C, H;
};

struct ForwardCache {
  int T = 0, B = 0;
  Eigen::MatrixXd mask;  // T x B, 1 for real steps
  std::vector<LayerCache> layers;
  std::vector<std::vector<Eigen::MatrixXd>> inter_drop;  // [l-1][t], 0 or 1/(1-p)
  Eigen::MatrixXd final_drop;                            // empty when dropout is off
  Eigen::MatrixXd final_state;                           // top-layer state fed to the softmax
  Eigen::MatrixXd probs;                                 // classes x B
};

// Shared batched forward; caches stay around for BPTT.
void forward_batch(const GruModel& model, std::span<const std::vector<int>> token_rows,
                   Rng* dropout_rng, ForwardCache& fc) {
  const int B = static_cast<int>(token_rows.size());
  int T = 1;
  for (const auto& rows : token_rows) T = std::max(T, static_cast<int>(rows.size()));
  const int h = model.hidden();
  const int d = model.embeddings.dims();
  const double keep = 1.0 - model.config.dropout_rate;
  const bool use_dropout = dropout_rng != nullptr && model.config.dropout_rate > 0.0;

  fc.T = T;
  fc.B = B;
  fc.mask = Eigen::MatrixXd::Zero(T, B);
  for (int b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < token_rows[static_cast<std::size_t>(b)].size(); ++t) {
      fc.mask(static_cast<Eigen::Index>(t), b) = 1.0;
    }
  }

  fc.layers.assign(static_cast<std::size_t>(model.config.layers), {});
  fc.inter_drop.assign(static_cast<std::size_t>(model.config.layers - 1), {});

  for (int l = 0; l < model.config.layers; ++l) {
    auto& lc = fc.layers[static_cast<std::size_t>(l)];
    lc.X.resize(static_cast<std::size_t>(T));
    lc.Z.resize(static_cast<std::size_t>(T));
    lc.R.resize(static_cast<std::size_t>(T));
    lc.C.resize(static_cast<std::size_t>(T));
    lc.H.resize(static_cast<std::size_t>(T));
    if (l > 0) fc.inter_drop[static_cast<std::size_t>(l - 1)].resize(static_cast<std::size_t>(T));
    const auto& params = model.layers[static_cast<std::size_t>(l)];

    for (int t = 0; t < T; ++t) {
      Eigen::MatrixXd& Xt = lc.X[static_cast<std::size_t>(t)];
      if (l == 0) {
        Xt = Eigen::MatrixXd::Zero(d, B);
        for (int b = 0; b < B; ++b) {
          const auto& rows = token_rows[static_cast<std::size_t>(b)];
          if (static_cast<std::size_t>(t) < rows.size()) {
            Xt.col(b) = model.embeddings.rows.row(rows[static_cast<std::size_t>(t)]).transpose();
          }
        }
      } else {
        Xt = fc.layers[static_cast<std::size_t>(l - 1)].H[static_cast<std::size_t>(t)];
        if (use_dropout) {
          Eigen::MatrixXd drop(h, B);
          for (Eigen::Index r = 0; r < drop.rows(); ++r) {
            for (Eigen::Index c = 0; c < drop.cols(); ++c) {
              drop(r, c) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
            }
          }
          fc.inter_drop[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(t)] = drop;
          Xt = Xt.cwiseProduct(drop);
        }
      }

      const Eigen::MatrixXd Hprev =
          t > 0 ? lc.H[static_cast<std::size_t>(t - 1)] : Eigen::MatrixXd::Zero(h, B);
      Eigen::MatrixXd Az = params.Wz * Xt + params.Uz * Hprev;
      Az.colwise() += params.bz;
      Eigen::MatrixXd Ar = params.Wr * Xt + params.Ur * Hprev;
      Ar.colwise() += params.br;
      lc.Z[static_cast<std::size_t>(t)] = sigmoid(Az);
      lc.R[static_cast<std::size_t>(t)] = sigmoid(Ar);
      Eigen::MatrixXd Ah =
          params.Wh * Xt + params.Uh * lc.R[static_cast<std::size_t>(t)].cwiseProduct(Hprev);
      Ah.colwise() += params.bh;
      lc.C[static_cast<std::size_t>(t)] = Ah.array().tanh().matrix();

      const auto& Z = lc.Z[static_cast<std::size_t>(t)];
      const auto& C = lc.C[static_cast<std::size_t>(t)];
      Eigen::MatrixXd Hnew = Z.cwiseProduct(Hprev) + (1.0 - Z.array()).matrix().cwiseProduct(C);
      // masked steps carry the previous state forward unchanged
      const auto m = fc.mask.row(t).array();
      lc.H[static_cast<std::size_t>(t)] =
          ((Hnew.array().rowwise() * m) + (Hprev.array().rowwise() * (1.0 - m))).matrix();
    }
  }

  fc.final_state = fc.layers.back().H[static_cast<std::size_t>(T - 1)];
  if (use_dropout) {
    fc.final_drop.resize(h, B);
    for (Eigen::Index r = 0; r < h; ++r) {
      for (Eigen::Index c = 0; c < B; ++c) {
        fc.final_drop(r, c) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
      }
    }
    fc.final_state = fc.final_state.cwiseProduct(fc.final_drop);
  }

  Eigen::MatrixXd logits = model.w_out * fc.final_state;
  logits.colwise() += model.b_out;
  fc.probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const double m = logits.col(b).maxCoeff();
    fc.probs.col(b) = (logits.col(b).array() - m).exp();
    fc.probs.col(b) /= fc.probs.col(b).sum();
  }
}

GruLayerParams zero_like(const GruLayerParams& p) {
  GruLayerParams g;
  g.Wz = Eigen::MatrixXd::Zero(p.Wz.rows(), p.Wz.cols());
  g.Wr = Eigen::MatrixXd::Zero(p.Wr.rows(), p.Wr.cols());
  g.Wh = Eigen::MatrixXd::Zero(p.Wh.rows(), p.Wh.cols());
  g.Uz = Eigen::MatrixXd::Zero(p.Uz.rows(), p.Uz.cols());
  g.Ur = Eigen::MatrixXd::Zero(p.Ur.rows(), p.Ur.cols());
  g.Uh = Eigen::MatrixXd::Zero(p.Uh.rows(), p.Uh.cols());
  g.bz = Eigen::VectorXd::Zero(p.bz.size());
  g.br = Eigen::VectorXd::Zero(p.br.size());
  g.bh = Eigen::VectorXd::Zero(p.bh.size());
  return g;
}

}  // namespace

GruModel gru_init(const GruConfig& cfg, WordEmbeddingTable embeddings) {
  cfg.validate();
  GruModel model;
  model.config = cfg;
  model.embeddings = std::move(embeddings);
  Rng rng(derive_seed(cfg.seed, 0x696e6974ULL));  // "init"
  const int h = cfg.hidden_units;
  int in_dim = model.embeddings.dims();
  for (int l = 0; l < cfg.layers; ++l) {
    GruLayerParams p;
    p.Wz = glorot(h, in_dim, rng);
    p.Wr = glorot(h, in_dim, rng);
    p.Wh = glorot(h, in_dim, rng);
    p.Uz = glorot(h, h, rng);
    p.Ur = glorot(h, h, rng);
    p.Uh = glorot(h, h, rng);
    p.bz = Eigen::VectorXd::Zero(h);
    p.br = Eigen::VectorXd::Zero(h);
    p.bh = Eigen::VectorXd::Zero(h);
    model.layers.push_back(std::move(p));
    in_dim = h;
  }
  model.w_out = glorot(kNumClasses, h, rng);
  model.b_out = Eigen::VectorXd::Zero(kNumClasses);
  return model;
}

std::vector<int> token_rows_for(const WordEmbeddingTable& table,
                                std::span<const std::string> tokens) {
  if (tokens.empty()) return {table.oov_row()};
  std::vector<int> rows;
  rows.reserve(tokens.size());
  for (const auto& tok : tokens) rows.push_back(table.row_of(tok));
  return rows;
}

GruForward gru_forward(const GruModel& model, std::span<const std::string> tokens) {
  const std::vector<int> rows = token_rows_for(model.embeddings, tokens);
  ForwardCache fc;
  const std::vector<std::vector<int>> batch{rows};
  forward_batch(model, batch, nullptr, fc);

  GruForward out;
  out.states_per_layer.reserve(static_cast<std::size_t>(model.config.layers));
  for (const auto& lc : fc.layers) {
    Eigen::MatrixXd states(fc.T, model.hidden());
    for (int t = 0; t < fc.T; ++t) {
      states.row(t) = lc.H[static_cast<std::size_t>(t)].col(0).transpose();
    }
    out.states_per_layer.push_back(std::move(states));
  }
  out.final_state = fc.final_state.col(0);
  out.probabilities = fc.probs.col(0);
  return out;
}

double gru_loss_and_gradients(const GruModel& model, std::span<const std::vector<int>> token_rows,
                              std::span<const int> labels, GruGradients* grads, Rng* dropout_rng) {
  ForwardCache fc;
  forward_batch(model, token_rows, dropout_rng, fc);
  const int B = fc.B;
  const int T = fc.T;

  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    loss -= std::log(std::max(fc.probs(labels[static_cast<std::size_t>(b)], b), 1e-300));
  }
  loss /= static_cast<double>(B);
  if (!grads) return loss;

  grads->layers.clear();
  for (const auto& p : model.layers) grads->layers.push_back(zero_like(p));
  grads->w_out = Eigen::MatrixXd::Zero(model.w_out.rows(), model.w_out.cols());
  grads->b_out = Eigen::VectorXd::Zero(model.b_out.size());
  grads->embeddings =
      Eigen::MatrixXd::Zero(model.embeddings.rows.rows(), model.embeddings.rows.cols());

  Eigen::MatrixXd dlogits = fc.probs;
  for (int b = 0; b < B; ++b) dlogits(labels[static_cast<std::size_t>(b)], b) -= 1.0;
  dlogits /= static_cast<double>(B);

  grads->w_out = dlogits * fc.final_state.transpose();
  grads->b_out = dlogits.rowwise().sum();
  Eigen::MatrixXd dF = model.w_out.transpose() * dlogits;
  if (fc.final_drop.size() > 0) dF = dF.cwiseProduct(fc.final_drop);

  // seeds: gradient w.r.t. each layer's H[t] arriving from above
  const int h = model.hidden();
  std::vector<Eigen::MatrixXd> seed(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) seed[static_cast<std::size_t>(t)] = Eigen::MatrixXd::Zero(h, B);
  seed[static_cast<std::size_t>(T - 1)] = dF;

  for (int l = model.config.layers - 1; l >= 0; --l) {
    const auto& lc = fc.layers[static_cast<std::size_t>(l)];
    const auto& params = model.layers[static_cast<std::size_t>(l)];
    auto& g = grads->layers[static_cast<std::size_t>(l)];
    std::vector<Eigen::MatrixXd> next_seed;
    if (l > 0) {
      next_seed.assign(static_cast<std::size_t>(T), Eigen::MatrixXd());
    }

    Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(h, B);
    for (int t = T - 1; t >= 0; --t) {
      dH += seed[static_cast<std::size_t>(t)];
      const Eigen::MatrixXd Hprev =
          t > 0 ? lc.H[static_cast<std::size_t>(t - 1)] : Eigen::MatrixXd::Zero(h, B);
      const auto& Z = lc.Z[static_cast<std::size_t>(t)];
      const auto& R = lc.R[static_cast<std::size_t>(t)];
      const auto& C = lc.C[static_cast<std::size_t>(t)];
      const auto& Xt = lc.X[static_cast<std::size_t>(t)];
      const auto m = fc.mask.row(t).array();

      const Eigen::MatrixXd dHnew = (dH.array().rowwise() * m).matrix();
      Eigen::MatrixXd dHprev = (dH.array().rowwise() * (1.0 - m)).matrix();

      const Eigen::MatrixXd dZ = dHnew.cwiseProduct(Hprev - C);
      const Eigen::MatrixXd dC = dHnew.cwiseProduct((1.0 - Z.array()).matrix());
      dHprev += dHnew.cwiseProduct(Z);

      const Eigen::MatrixXd dAh = dC.cwiseProduct((1.0 - C.array().square()).matrix());
      g.Wh.noalias() += dAh * Xt.transpose();
      g.Uh.noalias() += dAh * R.cwiseProduct(Hprev).transpose();
      g.bh += dAh.rowwise().sum();

      const Eigen::MatrixXd dRH = params.Uh.transpose() * dAh;
      dHprev += dRH.cwiseProduct(R);
      const Eigen::MatrixXd dAr =
          dRH.cwiseProduct(Hprev).cwiseProduct(R).cwiseProduct((1.0 - R.array()).matrix());
      g.Wr.noalias() += dAr * Xt.transpose();
      g.Ur.noalias() += dAr * Hprev.transpose();
      g.br += dAr.rowwise().sum();
      dHprev.noalias() += params.Ur.transpose() * dAr;

      const Eigen::MatrixXd dAz =
          dZ.cwiseProduct(Z).cwiseProduct((1.0 - Z.array()).matrix());
      g.Wz.noalias() += dAz * Xt.transpose();
      g.Uz.noalias() += dAz * Hprev.transpose();
      g.bz += dAz.rowwise().sum();
      dHprev.noalias() += params.Uz.transpose() * dAz;

      Eigen::MatrixXd dXt = params.Wz.transpose() * dAz;
      dXt.noalias() += params.Wr.transpose() * dAr;
      dXt.noalias() += params.Wh.transpose() * dAh;
      if (l > 0) {
        if (fc.inter_drop[static_cast<std::size_t>(l - 1)].size() > 0 &&
            fc.inter_drop[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(t)].size() > 0) {
          dXt = dXt.cwiseProduct(
              fc.inter_drop[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(t)]);
        }
        next_seed[static_cast<std::size_t>(t)] = std::move(dXt);
      } else {
        for (int b = 0; b < B; ++b) {
          const auto& rows = token_rows[static_cast<std::size_t>(b)];
          if (static_cast<std::size_t>(t) < rows.size()) {
            grads->embeddings.row(rows[static_cast<std::size_t>(t)]) += dXt.col(b).transpose();
          }
        }
      }
      dH = dHprev;
    }
    if (l > 0) seed = std::move(next_seed);
  }
  return loss;
}

namespace {

double batch_validation_loss(const GruModel& model, std::span<const std::vector<int>> rows,
                             std::span<const int> labels) {
  double total = 0.0;
  const std::size_t n = rows.size();
  const std::size_t bs = static_cast<std::size_t>(model.config.batch_size);
  for (std::size_t start = 0; start < n; start += bs) {
    const std::size_t end = std::min(n, start + bs);
    const std::span<const std::vector<int>> brows(rows.data() + start, end - start);
    const std::span<const int> blabels(labels.data() + start, end - start);
    total += gru_loss_and_gradients(model, brows, blabels, nullptr, nullptr) *
             static_cast<double>(end - start);
  }
  return total / static_cast<double>(n);
}

struct Snapshot {
  std::vector<GruLayerParams> layers;
  Eigen::MatrixXd w_out;
  Eigen::VectorXd b_out;
  Eigen::MatrixXd embedding_rows;
};

Snapshot take_snapshot(const GruModel& m) {
  return {m.layers, m.w_out, m.b_out, m.embeddings.rows};
}

void restore_snapshot(GruModel& m, const Snapshot& s) {
  m.layers = s.layers;
  m.w_out = s.w_out;
  m.b_out = s.b_out;
  m.embeddings.rows = s.embedding_rows;
}

}  // namespace

void gru_train(GruModel& model, std::span<const LabeledDocument> docs) {
  const GruConfig& cfg = model.config;
  cfg.validate();

  std::array<std::vector<int>, kNumClasses> by_class;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    by_class[static_cast<std::size_t>(docs[i].label)].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (by_class[static_cast<std::size_t>(c)].empty()) {
      throw DegenerateSplitError("gru_train: class '" +
                                 std::string(label_name(static_cast<Label>(c))) +
                                 "' is absent from the training split");
    }
  }

  std::vector<std::vector<int>> rows(docs.size());
  std::vector<int> labels(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    rows[i] = token_rows_for(model.embeddings, docs[i].tokens);
    labels[i] = static_cast<int>(docs[i].label);
  }

  std::vector<Label> doc_labels(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) doc_labels[i] = docs[i].label;
  auto [train_ix, val_ix] = stratified_holdout(doc_labels, cfg.validation_fraction, cfg.seed);

  std::vector<std::vector<int>> val_rows;
  std::vector<int> val_labels;
  for (const int i : val_ix) {
    val_rows.push_back(rows[static_cast<std::size_t>(i)]);
    val_labels.push_back(labels[static_cast<std::size_t>(i)]);
  }

  // one Adam state per parameter block, shared step counter
  std::vector<std::array<AdamState, 9>> layer_states;
  for (const auto& p : model.layers) {
    layer_states.push_back({AdamState(p.Wz.rows(), p.Wz.cols()), AdamState(p.Wr.rows(), p.Wr.cols()),
                            AdamState(p.Wh.rows(), p.Wh.cols()), AdamState(p.Uz.rows(), p.Uz.cols()),
                            AdamState(p.Ur.rows(), p.Ur.cols()), AdamState(p.Uh.rows(), p.Uh.cols()),
                            AdamState(p.bz.size(), 1), AdamState(p.br.size(), 1),
                            AdamState(p.bh.size(), 1)});
  }
  AdamState state_wout(model.w_out.rows(), model.w_out.cols());
  AdamState state_bout(model.b_out.size(), 1);
  AdamState state_emb(model.embeddings.rows.rows(), model.embeddings.rows.cols());

  Rng order_rng(derive_seed(cfg.seed, 0x6f726465ULL));  // "orde"
  Rng dropout_rng(derive_seed(cfg.seed, 0x64726f70ULL));  // "drop"

  double best_val = std::numeric_limits<double>::infinity();
  Snapshot best;
  bool have_best = false;
  int bad_epochs = 0;
  long t = 0;
  GruGradients grads;
  model.training_log.clear();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(train_ix);
    double train_loss = 0.0;
    for (std::size_t start = 0; start < train_ix.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(train_ix.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::vector<int>> brows;
      std::vector<int> blabels;
      brows.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        brows.push_back(rows[static_cast<std::size_t>(train_ix[k])]);
        blabels.push_back(labels[static_cast<std::size_t>(train_ix[k])]);
      }
      const double loss = gru_loss_and_gradients(model, brows, blabels, &grads,
                                                 cfg.dropout_rate > 0.0 ? &dropout_rng : nullptr);
      train_loss += loss * static_cast<double>(end - start);
      ++t;
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& p = model.layers[l];
        auto& g = grads.layers[l];
        auto& s = layer_states[l];
        s[0].step(p.Wz, g.Wz, cfg.adam, t);
        s[1].step(p.Wr, g.Wr, cfg.adam, t);
        s[2].step(p.Wh, g.Wh, cfg.adam, t);
        s[3].step(p.Uz, g.Uz, cfg.adam, t);
        s[4].step(p.Ur, g.Ur, cfg.adam, t);
        s[5].step(p.Uh, g.Uh, cfg.adam, t);
        Eigen::Map<Eigen::MatrixXd> bz(p.bz.data(), p.bz.size(), 1);
        Eigen::Map<Eigen::MatrixXd> br(p.br.data(), p.br.size(), 1);
        Eigen::Map<Eigen::MatrixXd> bh(p.bh.data(), p.bh.size(), 1);
        s[6].step(bz, g.bz, cfg.adam, t);
        s[7].step(br, g.br, cfg.adam, t);
        s[8].step(bh, g.bh, cfg.adam, t);
      }
      state_wout.step(model.w_out, grads.w_out, cfg.adam, t);
      Eigen::Map<Eigen::MatrixXd> bout(model.b_out.data(), model.b_out.size(), 1);
      state_bout.step(bout, grads.b_out, cfg.adam, t);
      state_emb.step(model.embeddings.rows, grads.embeddings, cfg.adam, t);
    }
    train_loss /= static_cast<double>(train_ix.size());

    double val_loss = train_loss;  // no holdout -> no early stopping signal
    if (!val_rows.empty()) {
      val_loss = batch_validation_loss(model, val_rows, val_labels);
    }
    model.training_log.emplace_back(train_loss, val_loss);

    if (!val_rows.empty()) {
      if (val_loss < best_val) {
        best_val = val_loss;
        best = take_snapshot(model);
        have_best = true;
        bad_epochs = 0;
      } else if (++bad_epochs >= cfg.patience) {
        break;
      }
    }
  }
  if (have_best) restore_snapshot(model, best);
}

FeatureMatrix extract_hidden_features(const GruModel& model, std::span<const LabeledDocument> docs) {
  Eigen::MatrixXd features(static_cast<Eigen::Index>(docs.size()), model.hidden());
  const std::size_t bs = static_cast<std::size_t>(model.config.batch_size);
  for (std::size_t start = 0; start < docs.size(); start += bs) {
    const std::size_t end = std::min(docs.size(), start + bs);
    std::vector<std::vector<int>> brows;
    brows.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) {
      brows.push_back(token_rows_for(model.embeddings, docs[k].tokens));
    }
    ForwardCache fc;
    forward_batch(model, brows, nullptr, fc);
    for (std::size_t k = start; k < end; ++k) {
      features.row(static_cast<Eigen::Index>(k)) =
          fc.final_state.col(static_cast<Eigen::Index>(k - start)).transpose();
    }
  }
  return FeatureMatrix::from(FeatureKind::hidden_state, std::move(features));
}

WordEmbeddingTable extract_tuned_embeddings(const GruModel& model) { return model.embeddings; }

namespace {

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_exact(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(const std::vector<std::string>& lines, std::size_t& pos,
                            Eigen::Index rows, Eigen::Index cols, const std::string& path) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (pos >= lines.size()) throw FormatError(path + ": truncated matrix");
    const auto fields = split_whitespace(lines[pos]);
    ++pos;
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw FormatError(path + ": matrix row has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = parse_double(fields[static_cast<std::size_t>(c)], path);
    }
  }
  return m;
}

}  // namespace

void save_gru_model(const GruModel& model, const std::string& path) {
  auto out = open_output(path);
  const GruConfig& c = model.config;
  out << "authprof-gru 1\n";
  out << c.hidden_units << ' ' << c.layers << ' ' << format_exact(c.dropout_rate) << ' ' << c.epochs
      << ' ' << c.batch_size << ' ' << format_exact(c.validation_fraction) << ' '
      << format_exact(c.adam.learning_rate) << ' ' << format_exact(c.adam.beta1) << ' '
      << format_exact(c.adam.beta2) << ' ' << format_exact(c.adam.epsilon) << ' ' << c.patience
      << ' ' << c.seed << '\n';
  out << model.embeddings.dims() << ' ' << model.embeddings.vocab.size() << '\n';
  std::vector<const std::string*> tokens_by_row(model.embeddings.vocab.size());
  for (const auto& [tok, row] : model.embeddings.vocab) {
    tokens_by_row[static_cast<std::size_t>(row)] = &tok;
  }
  for (const auto* tok : tokens_by_row) out << *tok << '\n';
  for (std::size_t i = 0; i < model.embeddings.pretrained.size(); ++i) {
    if (i) out << ' ';
    out << (model.embeddings.pretrained[i] ? 1 : 0);
  }
  out << '\n';
  write_matrix(out, model.embeddings.rows);
  for (const auto& p : model.layers) {
    write_matrix(out, p.Wz);
    write_matrix(out, p.Wr);
    write_matrix(out, p.Wh);
    write_matrix(out, p.Uz);
    write_matrix(out, p.Ur);
    write_matrix(out, p.Uh);
    write_matrix(out, p.bz.transpose());
    write_matrix(out, p.br.transpose());
    write_matrix(out, p.bh.transpose());
  }
  write_matrix(out, model.w_out);
  write_matrix(out, model.b_out.transpose());
}

GruModel load_gru_model(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 3 || split_whitespace(lines[0]) != std::vector<std::string>{"authprof-gru", "1"}) {
    throw FormatError(path + ": not an authprof-gru v1 checkpoint");
  }
  const auto cf = split_whitespace(lines[1]);
  if (cf.size() != 12) throw FormatError(path + ":2: bad config line");
  GruModel model;
  GruConfig& c = model.config;
  c.hidden_units = static_cast<int>(parse_long(cf[0], path));
  c.layers = static_cast<int>(parse_long(cf[1], path));
  c.dropout_rate = parse_double(cf[2], path);
  c.epochs = static_cast<int>(parse_long(cf[3], path));
  c.batch_size = static_cast<int>(parse_long(cf[4], path));
  c.validation_fraction = parse_double(cf[5], path);
  c.adam.learning_rate = parse_double(cf[6], path);
  c.adam.beta1 = parse_double(cf[7], path);
  c.adam.beta2 = parse_double(cf[8], path);
  c.adam.epsilon = parse_double(cf[9], path);
  c.patience = static_cast<int>(parse_long(cf[10], path));
  c.seed = static_cast<std::uint64_t>(parse_long(cf[11], path));

  const auto dims_line = split_whitespace(lines[2]);
  if (dims_line.size() != 2) throw FormatError(path + ":3: expected '<dims> <vocab>'");
  const long dims = parse_long(dims_line[0], path);
  const long vocab = parse_long(dims_line[1], path);

  std::size_t pos = 3;
  for (long i = 0; i < vocab; ++i) {
    if (pos >= lines.size()) throw FormatError(path + ": truncated vocabulary");
    model.embeddings.vocab[strip(lines[pos])] = static_cast<int>(i);
    ++pos;
  }
  if (pos >= lines.size()) throw FormatError(path + ": missing provenance flags");
  const auto flags = split_whitespace(lines[pos]);
  ++pos;
  if (static_cast<long>(flags.size()) != vocab + 1) {
    throw FormatError(path + ": provenance flag count mismatch");
  }
  model.embeddings.pretrained.resize(static_cast<std::size_t>(vocab) + 1);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    model.embeddings.pretrained[i] = flags[i] == "1";
  }
  model.embeddings.rows = read_matrix(lines, pos, vocab + 1, dims, path);

  int in_dim = static_cast<int>(dims);
  for (int l = 0; l < c.layers; ++l) {
    GruLayerParams p;
    p.Wz = read_matrix(lines, pos, c.hidden_units, in_dim, path);
    p.Wr = read_matrix(lines, pos, c.hidden_units, in_dim, path);
    p.Wh = read_matrix(lines, pos, c.hidden_units, in_dim, path);
    p.Uz = read_matrix(lines, pos, c.hidden_units, c.hidden_units, path);
    p.Ur = read_matrix(lines, pos, c.hidden_units, c.hidden_units, path);
    p.Uh = read_matrix(lines, pos, c.hidden_units, c.hidden_units, path);
    p.bz = read_matrix(lines, pos, 1, c.hidden_units, path).transpose();
    p.br = read_matrix(lines, pos, 1, c.hidden_units, path).transpose();
    p.bh = read_matrix(lines, pos, 1, c.hidden_units, path).transpose();
    model.layers.push_back(std::move(p));
    in_dim = c.hidden_units;
  }
  model.w_out = read_matrix(lines, pos, kNumClasses, c.hidden_units, path);
  model.b_out = read_matrix(lines, pos, 1, kNumClasses, path).transpose();
  return model;
}

}  // namespace authprof
