#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "authprof/features.hpp"
#include "authprof/optimize.hpp"
#include "authprof/text.hpp"

namespace authprof {

struct GruConfig {
  int hidden_units = 128;
  int layers = 2;
  double dropout_rate = 0.2;  // applied between layers and before the softmax
  int epochs = 50;            // upper bound; early stopping usually ends sooner
  int batch_size = 32;
  double validation_fraction = 0.1;  // stratified holdout for early stopping
  AdamConfig adam{};
  int patience = 5;  // epochs without validation improvement before stopping
  std::uint64_t seed = 1;

  void validate() const;
};

/// One recurrence layer: update gate z, reset gate r, tanh candidate,
/// h_t = z*h_prev + (1-z)*candidate.
struct GruLayerParams {
  Eigen::MatrixXd Wz, Wr, Wh;  // hidden x input
  Eigen::MatrixXd Uz, Ur, Uh;  // hidden x hidden
  Eigen::VectorXd bz, br, bh;
};

struct GruGradients {
  std::vector<GruLayerParams> layers;
  Eigen::MatrixXd w_out;
  Eigen::VectorXd b_out;
  Eigen::MatrixXd embeddings;
};

/// 2-layer GRU text classifier: embedding input, stacked GRU layers, softmax
/// over the three classes read off the last hidden state.
struct GruModel {
  WordEmbeddingTable embeddings;
  std::vector<GruLayerParams> layers;
  Eigen::MatrixXd w_out;  // classes x hidden
  Eigen::VectorXd b_out;
  GruConfig config;
  std::vector<std::pair<double, double>> training_log;  // per epoch (train, validation) loss

  int hidden() const { return static_cast<int>(w_out.cols()); }
};

/// Glorot-initialized gate/softmax weights, zero biases; takes ownership of
/// the embedding table.
GruModel gru_init(const GruConfig& cfg, WordEmbeddingTable embeddings);

struct GruForward {
  std::vector<Eigen::MatrixXd> states_per_layer;  // time x hidden each
  Eigen::VectorXd final_state;
  Eigen::Vector3d probabilities;
};

/// Inference on one document; an empty sequence is read as the OOV token.
GruForward gru_forward(const GruModel& model, std::span<const std::string> tokens);

/// Mean cross-entropy over the batch and gradients for every parameter
/// group, embeddings included. `dropout_rng` enables inverted dropout; null
/// runs the deterministic path used at inference and in gradient tests.
double gru_loss_and_gradients(const GruModel& model, std::span<const std::vector<int>> token_rows,
                              std::span<const int> labels, GruGradients* grads,
                              class Rng* dropout_rng);

/// BPTT + Adam with stratified validation holdout and best-epoch restore.
/// Deterministic given cfg.seed. Throws DegenerateSplitError when a class is
/// missing from the training split.
void gru_train(GruModel& model, std::span<const LabeledDocument> docs);

/// Final top-layer state per document, dropout off. Width = hidden_units.
FeatureMatrix extract_hidden_features(const GruModel& model, std::span<const LabeledDocument> docs);

/// The jointly updated embedding table, for the embedding-sum pipeline.
WordEmbeddingTable extract_tuned_embeddings(const GruModel& model);

/// Token -> embedding row indices; empty documents map to the OOV row.
std::vector<int> token_rows_for(const WordEmbeddingTable& table,
                                std::span<const std::string> tokens);

/// Versioned text checkpoint (config, vocabulary, matrices); parameters
/// round-trip bit-exactly.
void save_gru_model(const GruModel& model, const std::string& path);
GruModel load_gru_model(const std::string& path);

}  // namespace authprof
