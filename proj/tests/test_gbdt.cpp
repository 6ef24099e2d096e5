#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "authprof/errors.hpp"
#include "authprof/gbdt.hpp"
#include "authprof/rng.hpp"
#include "authprof/util.hpp"

using namespace authprof;

namespace {

struct Fixture {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

Fixture load_fixture() {
  const auto lines = read_lines(std::string(AUTHPROF_SOURCE_DIR) + "/tests/data/gbdt_fixture.tsv");
  std::vector<std::array<double, 2>> xs;
  std::vector<int> ys;
  for (const auto& line : lines) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_char(line, '\t');
    REQUIRE(fields.size() == 3);
    xs.push_back({parse_double(fields[0], "fixture"), parse_double(fields[1], "fixture")});
    ys.push_back(static_cast<int>(parse_long(fields[2], "fixture")));
  }
  Fixture f;
  f.X.resize(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.X(static_cast<Eigen::Index>(i), 0) = xs[i][0];
    f.X(static_cast<Eigen::Index>(i), 1) = xs[i][1];
  }
  f.y = std::move(ys);
  return f;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("zero rounds predicts the class priors everywhere") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 0;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);
  const auto probs = model.predict_proba(f.X);
  double prior[3] = {0, 0, 0};
  for (const int y : f.y) prior[y] += 1.0 / static_cast<double>(f.y.size());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    for (int c = 0; c < 3; ++c) CHECK(probs(r, c) == doctest::Approx(prior[c]).epsilon(1e-12));
  }
}

TEST_CASE("per-round log-loss matches the independent reference to 1e-9") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 10;
  cfg.learning_rate = 0.1;
  cfg.max_depth = 2;
  cfg.min_samples_leaf = 1;
  cfg.l2_leaf_reg = 1.0;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);

  const auto expected_lines =
      read_lines(std::string(AUTHPROF_SOURCE_DIR) + "/tests/data/gbdt_reference_losses.txt");
  std::vector<double> expected;
  for (const auto& line : expected_lines) {
    if (!strip(line).empty()) expected.push_back(parse_double(strip(line), "reference"));
  }
  REQUIRE(expected.size() == 11);
  REQUIRE(model.training_loss.size() == 11);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(model.training_loss[i] - expected[i]) < 1e-9);
  }
}

TEST_CASE("a separating stump drives training accuracy to 1") {
  Eigen::MatrixXd X(12, 1);
  std::vector<int> y;
  for (int i = 0; i < 12; ++i) {
    X(i, 0) = i < 6 ? static_cast<double>(i) : static_cast<double>(i) + 10.0;
    y.push_back(i < 6 ? 0 : 1);
  }
  GbdtConfig cfg;
  cfg.rounds = 50;
  cfg.learning_rate = 0.5;
  cfg.max_depth = 1;
  cfg.min_samples_leaf = 1;
  const GbdtModel model = gbdt_fit(X, y, cfg);
  const auto probs = model.predict_proba(X);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index arg = 0;
    probs.row(r).maxCoeff(&arg);
    CHECK(static_cast<int>(arg) == y[static_cast<std::size_t>(r)]);
  }
}

TEST_CASE("probabilities sum to one") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 5;
  cfg.min_samples_leaf = 2;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);
  const auto probs = model.predict_proba(f.X);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    CHECK(std::abs(probs.row(r).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("shifts that cross no threshold leave predictions unchanged") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 8;
  cfg.min_samples_leaf = 1;
  cfg.max_depth = 3;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);

  // find the smallest gap between any row value and any threshold on column 0
  std::vector<double> thresholds;
  for (const auto& round_trees : model.rounds) {
    for (const auto& tree : round_trees) {
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf() && node.feature == 0) thresholds.push_back(node.threshold);
      }
    }
  }
  REQUIRE(!thresholds.empty());
  double gap = 1e9;
  for (Eigen::Index r = 0; r < f.X.rows(); ++r) {
    for (const double t : thresholds) gap = std::min(gap, std::abs(f.X(r, 0) - t));
  }
  Eigen::MatrixXd shifted = f.X;
  shifted.col(0).array() += gap / 2.0;
  CHECK((model.predict_proba(shifted) - model.predict_proba(f.X)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("splits are rank-based: monotone transforms refit to the same labels") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 6;
  cfg.min_samples_leaf = 2;
  const GbdtModel base = gbdt_fit(f.X, f.y, cfg);

  Eigen::MatrixXd warped = f.X;
  for (Eigen::Index r = 0; r < warped.rows(); ++r) {
    warped(r, 0) = std::exp(warped(r, 0) / 3.0);
    warped(r, 1) = warped(r, 1) * warped(r, 1) * warped(r, 1);
  }
  const GbdtModel refit = gbdt_fit(warped, f.y, cfg);
  const auto p1 = base.predict_proba(f.X);
  const auto p2 = refit.predict_proba(warped);
  for (Eigen::Index r = 0; r < p1.rows(); ++r) {
    Eigen::Index a1 = 0, a2 = 0;
    p1.row(r).maxCoeff(&a1);
    p2.row(r).maxCoeff(&a2);
    CHECK(a1 == a2);
  }
}

TEST_CASE("training loss never increases under the default-style config") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 40;
  cfg.learning_rate = 0.1;
  cfg.l2_leaf_reg = 1.0;
  cfg.min_samples_leaf = 1;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);
  for (std::size_t i = 1; i < model.training_loss.size(); ++i) {
    CHECK(model.training_loss[i] <= model.training_loss[i - 1] + 1e-12);
  }
}

TEST_CASE("identical config and seed give byte-identical model files") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 6;
  cfg.feature_subsample = 0.5;
  cfg.min_samples_leaf = 1;
  cfg.seed = 42;
  const GbdtModel m1 = gbdt_fit(f.X, f.y, cfg);
  const GbdtModel m2 = gbdt_fit(f.X, f.y, cfg);
  save_gbdt_model(m1, "/tmp/authprof_gbdt_a.txt");
  save_gbdt_model(m2, "/tmp/authprof_gbdt_b.txt");
  CHECK(file_bytes("/tmp/authprof_gbdt_a.txt") == file_bytes("/tmp/authprof_gbdt_b.txt"));
}

TEST_CASE("model files round-trip exactly") {
  const Fixture f = load_fixture();
  GbdtConfig cfg;
  cfg.rounds = 4;
  cfg.min_samples_leaf = 1;
  const GbdtModel model = gbdt_fit(f.X, f.y, cfg);
  save_gbdt_model(model, "/tmp/authprof_gbdt_rt.txt");
  const GbdtModel back = load_gbdt_model("/tmp/authprof_gbdt_rt.txt");
  save_gbdt_model(back, "/tmp/authprof_gbdt_rt2.txt");
  CHECK(file_bytes("/tmp/authprof_gbdt_rt.txt") == file_bytes("/tmp/authprof_gbdt_rt2.txt"));
  CHECK((back.predict_proba(f.X) - model.predict_proba(f.X)).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd wrong(2, 5);
  CHECK_THROWS_AS(static_cast<void>(model.predict_proba(wrong)), ShapeError);
}

TEST_CASE("grid search returns the lone config untried, rejects empty grids") {
  const Fixture f = load_fixture();
  GbdtConfig only;
  only.rounds = 7;
  const std::vector<GbdtConfig> grid{only};
  const GbdtConfig best = gbdt_grid_search(f.X, f.y, grid, 5, 1);
  CHECK(best.rounds == 7);
  CHECK_THROWS_AS(static_cast<void>(gbdt_grid_search(f.X, f.y, {}, 5, 1)), ConfigError);
}

TEST_CASE("grid search prefers a working config over a crippled one") {
  // separable data: feature 0 alone decides the class
  Rng rng(3);
  Eigen::MatrixXd X(90, 2);
  std::vector<int> y;
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    X(i, 0) = static_cast<double>(c) * 4.0 + rng.uniform(0, 1);
    X(i, 1) = rng.uniform(0, 1);
    y.push_back(c);
  }
  GbdtConfig good;
  good.rounds = 30;
  good.max_depth = 3;
  good.min_samples_leaf = 1;
  GbdtConfig crippled = good;
  crippled.rounds = 0;
  const std::vector<GbdtConfig> grid{crippled, good};
  const GbdtConfig best = gbdt_grid_search(X, y, grid, 5, 9);
  CHECK(best.rounds == 30);
}

TEST_CASE("degenerate labels and bad configs are rejected") {
  Eigen::MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  const std::vector<int> y{2, 2, 2, 2};
  CHECK_THROWS_AS(static_cast<void>(gbdt_fit(X, y, GbdtConfig{})), DegenerateLabelsError);
  const std::vector<int> ok{0, 1, 0, 1};
  GbdtConfig bad;
  bad.max_depth = 0;
  CHECK_THROWS_AS(static_cast<void>(gbdt_fit(X, ok, bad)), ConfigError);
}
