#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "authprof/graph.hpp"

namespace authprof {

struct WalkConfig {
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  int walk_length = 80;       // nodes per walk, including the start
  int walks_per_node = 10;
  int window = 10;            // context radius
  int negatives_per_positive = 5;
  int dims = 200;
  int epochs = 25;
  double learning_rate = 0.025;  // linearly decayed to 1e-4 over all pairs
  std::uint64_t seed = 1;

  void validate() const;  // ConfigError on out-of-range fields
};

/// Second-order walk corpus over graph indices. Every step follows an edge;
/// walks start only at non-solitary nodes.
struct WalkCorpus {
  std::vector<std::vector<int>> walks;
  std::size_t size() const { return walks.size(); }
};

/// Unnormalized next-step weights at `cur` having arrived from `prev`:
/// 1/p back to prev, 1 to shared neighbors of prev, 1/q otherwise.
/// prev < 0 means first step (uniform). Pairs are ordered by neighbor index.
std::vector<std::pair<int, double>> transition_weights(const IndexedGraph& g, int prev, int cur,
                                                       double p, double q);

/// walks_per_node walks from every non-solitary node. Each start node uses a
/// seed derived from (cfg.seed, node index), so the corpus is identical no
/// matter how many workers run.
WalkCorpus generate_walks(const IndexedGraph& g, const WalkConfig& cfg, int threads = 1);

/// Author id -> embedding. Solitary and unknown authors read as the zero
/// vector; solitary graph nodes get explicit zero rows.
class AuthorProfileTable {
 public:
  AuthorProfileTable() = default;
  AuthorProfileTable(std::map<AuthorId, int> index, Eigen::MatrixXd vectors);

  int dims() const { return static_cast<int>(vectors_.cols()); }
  std::size_t size() const { return index_.size(); }
  bool contains(const AuthorId& a) const { return index_.count(a) != 0; }

  Eigen::VectorXd profile_of(const AuthorId& a) const;

  const std::map<AuthorId, int>& index() const { return index_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  /// Word-vector text format: `<count> <dims>` header then one author per
  /// line, components at 6 significant digits.
  void save(const std::string& path) const;
  static AuthorProfileTable load(const std::string& path);

 private:
  std::map<AuthorId, int> index_;
  Eigen::MatrixXd vectors_;
};

struct ProfileTrainResult {
  AuthorProfileTable table;
  std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
};

/// Skip-gram with negative sampling over the walk corpus; the center matrix
/// becomes the exported profile. Deterministic, single-threaded.
ProfileTrainResult train_profiles(const IndexedGraph& g, const WalkCorpus& corpus,
                                  const WalkConfig& cfg);

/// Loss and gradients of one (center, positive context, negatives) triple:
///   -log sigma(c.ctx_pos) - sum_k log sigma(-c.ctx_k).
/// Exposed so gradient tests can target the exact training math.
double sgns_triple_loss(const Eigen::VectorXd& center, const Eigen::VectorXd& positive,
                        const std::vector<Eigen::VectorXd>& negatives,
                        Eigen::VectorXd* grad_center, Eigen::VectorXd* grad_positive,
                        std::vector<Eigen::VectorXd>* grad_negatives);

}  // namespace authprof
