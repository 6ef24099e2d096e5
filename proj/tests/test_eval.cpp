#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "authprof/errors.hpp"
#include "authprof/eval.hpp"
#include "authprof/rng.hpp"
#include "authprof/stats.hpp"

using namespace authprof;

namespace {

std::vector<Label> label_vector(int racism, int sexism, int none) {
  std::vector<Label> labels;
  labels.insert(labels.end(), static_cast<std::size_t>(racism), Label::racism);
  labels.insert(labels.end(), static_cast<std::size_t>(sexism), Label::sexism);
  labels.insert(labels.end(), static_cast<std::size_t>(none), Label::none);
  return labels;
}

// two-tailed p by adaptive Simpson integration of the t density
double t_pdf(double x, double nu) {
  const double c = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
                   std::sqrt(nu * M_PI);
  return c * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0);
}

double simpson(double a, double b, double nu, int depth) {
  const double m = 0.5 * (a + b);
  const double coarse = (b - a) / 6.0 * (t_pdf(a, nu) + 4.0 * t_pdf(m, nu) + t_pdf(b, nu));
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double fine = (b - a) / 12.0 *
                      (t_pdf(a, nu) + 4.0 * t_pdf(lm, nu) + 2.0 * t_pdf(m, nu) +
                       4.0 * t_pdf(rm, nu) + t_pdf(b, nu));
  if (depth <= 0 || std::abs(fine - coarse) < 1e-12) return fine;
  return simpson(a, m, nu, depth - 1) + simpson(m, b, nu, depth - 1);
}

double p_by_integration(double t, int df) {
  const double nu = static_cast<double>(df);
  const double at = std::abs(t);
  // integrate the upper tail out to a far cutoff
  double tail = simpson(at, at + 200.0, nu, 40);
  return 2.0 * tail;
}

}  // namespace

TEST_CASE("stratified folds spread classes evenly") {
  const auto labels = label_vector(10, 10, 10);
  const FoldPlan plan = make_folds(labels, 10, 3);
  CHECK(plan.folds.size() == 10);
  for (const auto& fold : plan.folds) {
    CHECK(fold.size() == 3);
    int per_class[3] = {0, 0, 0};
    for (const int i : fold) per_class[static_cast<int>(labels[static_cast<std::size_t>(i)])]++;
    CHECK(per_class[0] == 1);
    CHECK(per_class[1] == 1);
    CHECK(per_class[2] == 1);
  }
}

TEST_CASE("folds partition the dataset exactly") {
  Rng rng(11);
  std::vector<Label> labels;
  for (int i = 0; i < 137; ++i) labels.push_back(static_cast<Label>(rng.below(3)));
  // top up so every class has at least k members
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) labels.push_back(static_cast<Label>(c));
  }
  const FoldPlan plan = make_folds(labels, 10, 99);
  std::set<int> seen;
  std::size_t total = 0;
  for (const auto& fold : plan.folds) {
    total += fold.size();
    seen.insert(fold.begin(), fold.end());
  }
  CHECK(total == labels.size());
  CHECK(seen.size() == labels.size());

  // per-class counts differ by at most one across folds
  for (int c = 0; c < 3; ++c) {
    std::size_t lo = labels.size(), hi = 0;
    for (const auto& fold : plan.folds) {
      std::size_t n = 0;
      for (const int i : fold) {
        if (labels[static_cast<std::size_t>(i)] == static_cast<Label>(c)) ++n;
      }
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(hi - lo <= 1);
  }

  // deterministic given the seed
  const FoldPlan again = make_folds(labels, 10, 99);
  CHECK(plan.folds == again.folds);
}

TEST_CASE("paper-scale fold counts land on 193 or 194 racism rows") {
  const auto labels = label_vector(1939, 3148, 11115);
  const FoldPlan plan = make_folds(labels, 10, 7);
  for (const auto& fold : plan.folds) {
    int racism = 0;
    for (const int i : fold) {
      if (labels[static_cast<std::size_t>(i)] == Label::racism) ++racism;
    }
    CHECK((racism == 193 || racism == 194));
  }
}

TEST_CASE("make_folds rejects classes smaller than k") {
  const auto labels = label_vector(3, 12, 12);
  CHECK_THROWS_AS(static_cast<void>(make_folds(labels, 10, 1)), TooFewSamplesError);
}

TEST_CASE("stratified holdout hits the exact 90/10 split") {
  const auto labels = label_vector(10, 20, 70);
  const auto [train, val] = stratified_holdout(labels, 0.1, 5);
  CHECK(train.size() == 90);
  CHECK(val.size() == 10);
  int per_class[3] = {0, 0, 0};
  for (const int i : val) per_class[static_cast<int>(labels[static_cast<std::size_t>(i)])]++;
  CHECK(per_class[0] == 1);
  CHECK(per_class[1] == 2);
  CHECK(per_class[2] == 7);
}

TEST_CASE("class metrics: perfect, empty-prediction convention, hand case") {
  const auto gold = label_vector(2, 2, 2);
  CHECK(class_metrics(gold, gold, Label::racism).f1 == doctest::Approx(1.0));
  CHECK(class_metrics(gold, gold, Label::sexism).precision == doctest::Approx(1.0));

  // nothing predicted as racism although it exists
  std::vector<Label> none_pred(gold.size(), Label::none);
  const auto zero = class_metrics(none_pred, gold, Label::racism);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);

  // tp=2, fp=1, fn=2 for class racism
  const std::vector<Label> g2{Label::racism, Label::racism, Label::racism, Label::racism,
                              Label::none, Label::none};
  const std::vector<Label> p2{Label::racism, Label::racism, Label::none, Label::none,
                              Label::racism, Label::none};
  const auto s = class_metrics(p2, g2, Label::racism);
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(s.f1 == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("micro counts equal the number of correct predictions") {
  Rng rng(13);
  std::vector<Label> gold, pred;
  for (int i = 0; i < 200; ++i) {
    gold.push_back(static_cast<Label>(rng.below(3)));
    pred.push_back(static_cast<Label>(rng.below(3)));
  }
  long correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) ++correct;
  }
  double tp_sum = 0;
  for (int c = 0; c < 3; ++c) {
    const auto m = class_metrics(pred, gold, static_cast<Label>(c));
    long support = 0;
    for (const Label l : gold) {
      if (l == static_cast<Label>(c)) ++support;
    }
    tp_sum += m.recall * static_cast<double>(support);
  }
  CHECK(tp_sum == doctest::Approx(static_cast<double>(correct)));
}

TEST_CASE("weighted metric arithmetic") {
  CHECK(weighted_metric({1.0, 1.0, 1.0}, {0.12, 0.19, 0.69}) == doctest::Approx(1.0));
  CHECK(weighted_metric({0.5, 0.5, 1.0}, {0.12, 0.19, 0.69}) == doctest::Approx(0.845).epsilon(1e-12));
  CHECK(weighted_metric({0.0, 0.0, 0.0}, {0.12, 0.19, 0.69}) == 0.0);
  CHECK_THROWS_AS(static_cast<void>(weighted_metric({1, 1, 1}, {0.5, 0.2, 0.2})), WeightError);
}

TEST_CASE("paper-count proportions round to the published weights") {
  const auto labels = label_vector(1939, 3148, 11115);
  const auto w = rounded_weights(class_proportions(labels));
  CHECK(w[0] == doctest::Approx(0.12));
  CHECK(w[1] == doctest::Approx(0.19));
  CHECK(w[2] == doctest::Approx(0.69));
}

TEST_CASE("weighted recall equals accuracy when weights match fold proportions") {
  const auto gold = label_vector(12, 19, 69);
  Rng rng(3);
  std::vector<Label> pred;
  for (std::size_t i = 0; i < gold.size(); ++i) pred.push_back(static_cast<Label>(rng.below(3)));
  const auto weights = class_proportions(gold);
  std::array<double, 3> recalls{};
  for (int c = 0; c < 3; ++c) {
    recalls[static_cast<std::size_t>(c)] = class_metrics(pred, gold, static_cast<Label>(c)).recall;
  }
  long correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) ++correct;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  CHECK(weighted_metric(recalls, weights) == doctest::Approx(accuracy).epsilon(1e-12));
}

TEST_CASE("paired t-test matches the t table at the 0.05 boundary") {
  // difference vector engineered to give t = 2.262, df = 9
  std::vector<double> a(10, 0.0), b(10, 0.0);
  // d_i = mu + spread pattern with mean mu and sd s so that t = mu/(s/sqrt(10))
  const double target_t = 2.262;
  std::vector<double> base{-1.5, -1.0, -0.5, -0.25, 0.0, 0.0, 0.25, 0.5, 1.0, 1.5};
  double mean = 0.0;
  for (const double d : base) mean += d;
  mean /= 10.0;
  double ss = 0.0;
  for (const double d : base) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / 9.0);
  const double mu = target_t * sd / std::sqrt(10.0);
  for (int i = 0; i < 10; ++i) a[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + mu - mean;
  const auto res = paired_t_test(a, b);
  CHECK(res.df == 9);
  CHECK(res.t == doctest::Approx(2.262).epsilon(1e-9));
  CHECK(res.p == doctest::Approx(0.050).epsilon(5e-3));
}

TEST_CASE("paired t-test is antisymmetric and matches numerical integration") {
  const std::vector<double> a{0.84, 0.86, 0.83, 0.85, 0.88, 0.82, 0.87, 0.85, 0.84, 0.86};
  const std::vector<double> b{0.83, 0.84, 0.84, 0.83, 0.86, 0.80, 0.86, 0.83, 0.85, 0.84};
  const auto ab = paired_t_test(a, b);
  const auto ba = paired_t_test(b, a);
  CHECK(ab.t == -ba.t);
  CHECK(ab.p == ba.p);
  CHECK(ab.p == doctest::Approx(p_by_integration(ab.t, ab.df)).epsilon(1e-6));

  for (const double t : {0.5, 1.0, 2.0, 3.5}) {
    for (const int df : {4, 9, 19}) {
      CHECK(student_t_two_tailed(t, df) ==
            doctest::Approx(p_by_integration(t, df)).epsilon(1e-6));
    }
  }
}

TEST_CASE("identical score vectors raise the zero-variance signal") {
  const std::vector<double> a{0.5, 0.6, 0.7};
  CHECK_THROWS_AS(static_cast<void>(paired_t_test(a, a)), ZeroVarianceError);
  try {
    static_cast<void>(paired_t_test(a, a));
  } catch (const ZeroVarianceError& e) {
    CHECK(e.identical());
  }
  // constant nonzero shift: degenerate but not identical
  std::vector<double> shifted;
  for (const double v : a) shifted.push_back(v + 0.01);
  try {
    static_cast<void>(paired_t_test(shifted, a));
    CHECK(false);
  } catch (const ZeroVarianceError& e) {
    CHECK_FALSE(e.identical());
    CHECK(e.mean_difference == doctest::Approx(0.01));
  }
}
