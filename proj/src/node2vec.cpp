#include "authprof/node2vec.hpp"

#include <algorithm>
#include <cmath>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"
#include "authprof/util.hpp"

namespace authprof {

void WalkConfig::validate() const {
  if (p <= 0.0 || q <= 0.0) throw ConfigError("walk config: p and q must be positive");
  if (walk_length < 1) throw ConfigError("walk config: walk_length must be >= 1");
  if (dims < 1) throw ConfigError("walk config: dims must be >= 1");
  if (window < 1) throw ConfigError("walk config: window must be >= 1");
  if (walks_per_node < 0 || negatives_per_positive < 0 || epochs < 0) {
    throw ConfigError("walk config: counts must be non-negative");
  }
  if (learning_rate <= 0.0) throw ConfigError("walk config: learning_rate must be positive");
}

std::vector<std::pair<int, double>> transition_weights(const IndexedGraph& g, int prev, int cur,
                                                       double p, double q) {
  std::vector<std::pair<int, double>> out;
  const auto nbrs = g.neighbors(cur);
  out.reserve(nbrs.size());
  for (const int x : nbrs) {
    double w = 1.0;
    if (prev >= 0) {
      if (x == prev) {
        w = 1.0 / p;
      } else if (g.adjacent(prev, x)) {
        w = 1.0;
      } else {
        w = 1.0 / q;
      }
    }
    out.emplace_back(x, w);
  }
  return out;
}

namespace {

int sample_weighted(const std::vector<std::pair<int, double>>& weights, Rng& rng) {
  double total = 0.0;
  for (const auto& [node, w] : weights) total += w;
  const double r = rng.uniform() * total;
  double acc = 0.0;
  for (const auto& [node, w] : weights) {
    acc += w;
    if (r < acc) return node;
  }
  return weights.back().first;
}

std::vector<int> one_walk(const IndexedGraph& g, int start, const WalkConfig& cfg, Rng& rng) {
  std::vector<int> walk;
  walk.reserve(static_cast<std::size_t>(cfg.walk_length));
  walk.push_back(start);
  int prev = -1;
  while (walk.size() < static_cast<std::size_t>(cfg.walk_length)) {
    const int cur = walk.back();
    const auto weights = transition_weights(g, prev, cur, cfg.p, cfg.q);
    if (weights.empty()) break;  // dead end truncates the walk
    const int next = sample_weighted(weights, rng);
    prev = cur;
    walk.push_back(next);
  }
  return walk;
}

}  // namespace

WalkCorpus generate_walks(const IndexedGraph& g, const WalkConfig& cfg, int threads) {
  cfg.validate();
  std::vector<int> starts;
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) > 0) starts.push_back(i);
  }
  WalkCorpus corpus;
  corpus.walks.assign(starts.size() * static_cast<std::size_t>(cfg.walks_per_node), {});
  parallel_for(starts.size(), threads, [&](std::size_t si) {
    const int node = starts[si];
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(node)));
    for (int w = 0; w < cfg.walks_per_node; ++w) {
      corpus.walks[si * static_cast<std::size_t>(cfg.walks_per_node) + static_cast<std::size_t>(w)] =
          one_walk(g, node, cfg, rng);
    }
  });
  return corpus;
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigma(x)) without overflow in either tail
double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

double sgns_triple_loss(const Eigen::VectorXd& center, const Eigen::VectorXd& positive,
                        const std::vector<Eigen::VectorXd>& negatives,
                        Eigen::VectorXd* grad_center, Eigen::VectorXd* grad_positive,
                        std::vector<Eigen::VectorXd>* grad_negatives) {
  const double s_pos = center.dot(positive);
  double loss = -log_sigmoid(s_pos);
  const double g_pos = sigmoid(s_pos) - 1.0;  // d loss / d s_pos
  if (grad_center) *grad_center = g_pos * positive;
  if (grad_positive) *grad_positive = g_pos * center;
  if (grad_negatives) grad_negatives->assign(negatives.size(), Eigen::VectorXd());
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double s_neg = center.dot(negatives[k]);
    loss += -log_sigmoid(-s_neg);
    const double g_neg = sigmoid(s_neg);
    if (grad_center) *grad_center += g_neg * negatives[k];
    if (grad_negatives) (*grad_negatives)[k] = g_neg * center;
  }
  return loss;
}

AuthorProfileTable::AuthorProfileTable(std::map<AuthorId, int> index, Eigen::MatrixXd vectors)
    : index_(std::move(index)), vectors_(std::move(vectors)) {}

Eigen::VectorXd AuthorProfileTable::profile_of(const AuthorId& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return Eigen::VectorXd::Zero(dims());
  return vectors_.row(it->second);
}

void AuthorProfileTable::save(const std::string& path) const {
  auto out = open_output(path);
  out << index_.size() << ' ' << dims() << '\n';
  for (const auto& [id, row] : index_) {
    out << id;
    for (int c = 0; c < dims(); ++c) out << ' ' << format_g6(vectors_(row, c));
    out << '\n';
  }
}

AuthorProfileTable AuthorProfileTable::load(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw FormatError(path + ": empty profile file");
  const auto head = split_whitespace(lines[0]);
  if (head.size() != 2) throw FormatError(path + ":1: expected '<count> <dims>'");
  const long count = parse_long(head[0], path);
  const long dims = parse_long(head[1], path);
  std::map<AuthorId, int> index;
  Eigen::MatrixXd vectors(count, dims);
  long row = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (strip(lines[i]).empty()) continue;
    const auto fields = split_whitespace(lines[i]);
    if (static_cast<long>(fields.size()) != dims + 1) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": expected id and " +
                        std::to_string(dims) + " components");
    }
    if (row >= count) throw FormatError(path + ": more rows than the header declares");
    index[fields[0]] = static_cast<int>(row);
    for (long c = 0; c < dims; ++c) {
      vectors(row, c) = parse_double(fields[static_cast<std::size_t>(c) + 1], path);
    }
    ++row;
  }
  if (row != count) throw FormatError(path + ": header declares " + std::to_string(count) +
                                      " rows, found " + std::to_string(row));
  return AuthorProfileTable(std::move(index), std::move(vectors));
}

ProfileTrainResult train_profiles(const IndexedGraph& g, const WalkCorpus& corpus,
                                  const WalkConfig& cfg) {
  cfg.validate();
  const int n = g.node_count();
  const int d = cfg.dims;

  std::vector<long> freq(static_cast<std::size_t>(n), 0);
  for (const auto& walk : corpus.walks) {
    for (const int node : walk) ++freq[static_cast<std::size_t>(node)];
  }

  Rng rng(derive_seed(cfg.seed, 0x73676e73ULL));  // "sgns"
  Eigen::MatrixXd center(n, d);
  const double half = 0.5 / static_cast<double>(d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) center(i, c) = rng.uniform(-half, half);
  }
  // context rows start at zero, the usual negative-sampling convention
  Eigen::MatrixXd context = Eigen::MatrixXd::Zero(n, d);

  // unigram^(3/4) cumulative table over walked nodes
  std::vector<int> walked;
  std::vector<double> cum;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (freq[static_cast<std::size_t>(i)] > 0) {
      walked.push_back(i);
      total += std::pow(static_cast<double>(freq[static_cast<std::size_t>(i)]), 0.75);
      cum.push_back(total);
    }
  }

  ProfileTrainResult result;
  std::size_t pairs_per_epoch = 0;
  for (const auto& walk : corpus.walks) {
    const std::size_t len = walk.size();
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t lo = i > static_cast<std::size_t>(cfg.window) ? i - static_cast<std::size_t>(cfg.window) : 0;
      const std::size_t hi = std::min(len, i + static_cast<std::size_t>(cfg.window) + 1);
      pairs_per_epoch += (hi - lo) - 1;
    }
  }

  if (pairs_per_epoch > 0 && !walked.empty()) {
    const double start_lr = cfg.learning_rate;
    const double min_lr = std::min(1e-4, start_lr);
    const double total_pairs =
        static_cast<double>(pairs_per_epoch) * static_cast<double>(std::max(cfg.epochs, 1));
    const int k = cfg.negatives_per_positive;

    Eigen::VectorXd grad_center(d);
    std::size_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      double epoch_loss = 0.0;
      for (const auto& walk : corpus.walks) {
        const std::size_t len = walk.size();
        for (std::size_t i = 0; i < len; ++i) {
          const int c_node = walk[i];
          const std::size_t lo =
              i > static_cast<std::size_t>(cfg.window) ? i - static_cast<std::size_t>(cfg.window) : 0;
          const std::size_t hi = std::min(len, i + static_cast<std::size_t>(cfg.window) + 1);
          for (std::size_t j = lo; j < hi; ++j) {
            if (j == i) continue;
            const int o_node = walk[j];
            const double lr =
                std::max(min_lr, start_lr - (start_lr - min_lr) * static_cast<double>(t) / total_pairs);
            ++t;

            // positive pair
            const double s_pos = center.row(c_node).dot(context.row(o_node));
            const double gp = sigmoid(s_pos) - 1.0;
            epoch_loss += -log_sigmoid(s_pos);
            grad_center = gp * context.row(o_node).transpose();
            context.row(o_node) -= lr * gp * center.row(c_node);

            // negatives; collisions with the positive context are allowed
            for (int neg = 0; neg < k; ++neg) {
              const double r = rng.uniform() * total;
              const auto it = std::upper_bound(cum.begin(), cum.end(), r);
              const int n_node = walked[static_cast<std::size_t>(it - cum.begin() >=
                                                                 static_cast<std::ptrdiff_t>(walked.size())
                                                                     ? walked.size() - 1
                                                                     : it - cum.begin())];
              const double s_neg = center.row(c_node).dot(context.row(n_node));
              const double gn = sigmoid(s_neg);
              epoch_loss += -log_sigmoid(-s_neg);
              grad_center += gn * context.row(n_node).transpose();
              context.row(n_node) -= lr * gn * center.row(c_node);
            }
            center.row(c_node) -= lr * grad_center.transpose();
          }
        }
      }
      result.epoch_loss.push_back(epoch_loss / static_cast<double>(pairs_per_epoch));
    }
  }

  // walked nodes export their center row; everyone else (solitary) is zero
  std::map<AuthorId, int> index;
  Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(n, d);
  for (int i = 0; i < n; ++i) {
    index[g.id_of(i)] = i;
    if (freq[static_cast<std::size_t>(i)] > 0) vectors.row(i) = center.row(i);
  }
  result.table = AuthorProfileTable(std::move(index), std::move(vectors));
  return result;
}

}  // namespace authprof
