#include "authprof/eval.hpp"

#include <algorithm>
#include <cmath>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"
#include "authprof/stats.hpp"

namespace authprof {

std::vector<int> FoldPlan::train_indices(int fold) const {
  std::vector<int> out;
  for (int f = 0; f < k; ++f) {
    if (f == fold) continue;
    const auto& ix = folds[static_cast<std::size_t>(f)];
    out.insert(out.end(), ix.begin(), ix.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan make_folds(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be >= 2");
  std::array<std::vector<int>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& members = by_class[static_cast<std::size_t>(c)];
    if (!members.empty() && members.size() < static_cast<std::size_t>(k)) {
      throw TooFewSamplesError("class " + std::string(label_name(static_cast<Label>(c))) +
                               " has " + std::to_string(members.size()) + " members, need >= " +
                               std::to_string(k));
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(k), {});
  Rng rng(derive_seed(seed, 0x666f6c64ULL));  // "fold"
  for (int c = 0; c < kNumClasses; ++c) {
    auto members = by_class[static_cast<std::size_t>(c)];
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      plan.folds[i % static_cast<std::size_t>(k)].push_back(members[i]);
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

std::pair<std::vector<int>, std::vector<int>> stratified_holdout(std::span<const Label> labels,
                                                                 double fraction,
                                                                 std::uint64_t seed) {
  std::array<std::vector<int>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  const long total_holdout = std::lround(static_cast<double>(labels.size()) * fraction);
  std::array<long, kNumClasses> take{};
  std::array<double, kNumClasses> remainder{};
  long assigned = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double exact = static_cast<double>(by_class[static_cast<std::size_t>(c)].size()) * fraction;
    take[static_cast<std::size_t>(c)] = static_cast<long>(std::floor(exact));
    remainder[static_cast<std::size_t>(c)] = exact - std::floor(exact);
    assigned += take[static_cast<std::size_t>(c)];
  }
  for (long extra = total_holdout - assigned; extra > 0; --extra) {
    int pick = -1;
    for (int c = 0; c < kNumClasses; ++c) {
      const long cap = static_cast<long>(by_class[static_cast<std::size_t>(c)].size()) - 1;
      if (take[static_cast<std::size_t>(c)] >= cap) continue;
      if (pick < 0 ||
          remainder[static_cast<std::size_t>(c)] > remainder[static_cast<std::size_t>(pick)]) {
        pick = c;
      }
    }
    if (pick < 0) break;
    ++take[static_cast<std::size_t>(pick)];
    remainder[static_cast<std::size_t>(pick)] = -1.0;
  }

  Rng rng(derive_seed(seed, 0x73706c69ULL));  // "spli"
  std::vector<int> train, holdout;
  for (int c = 0; c < kNumClasses; ++c) {
    auto members = by_class[static_cast<std::size_t>(c)];
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < static_cast<std::size_t>(take[static_cast<std::size_t>(c)])) {
        holdout.push_back(members[i]);
      } else {
        train.push_back(members[i]);
      }
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(holdout.begin(), holdout.end());
  return {std::move(train), std::move(holdout)};
}

ClassScores class_metrics(std::span<const Label> predictions, std::span<const Label> gold, Label c) {
  if (predictions.size() != gold.size()) throw ShapeError("class_metrics: length mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool pred_c = predictions[i] == c;
    const bool gold_c = gold[i] == c;
    if (pred_c && gold_c) ++tp;
    else if (pred_c) ++fp;
    else if (gold_c) ++fn;
  }
  ClassScores s;
  s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
  return s;
}

std::array<double, 3> class_proportions(std::span<const Label> labels) {
  std::array<double, 3> counts{0.0, 0.0, 0.0};
  for (const Label l : labels) counts[static_cast<std::size_t>(l)] += 1.0;
  const double n = static_cast<double>(labels.size());
  if (n == 0.0) throw EmptyCorpusError("class_proportions: no labels");
  return {counts[0] / n, counts[1] / n, counts[2] / n};
}

std::array<double, 3> rounded_weights(const std::array<double, 3>& weights) {
  const auto r2 = [](double w) { return std::round(w * 100.0) / 100.0; };
  return {r2(weights[0]), r2(weights[1]), r2(weights[2])};
}

double weighted_metric(const std::array<double, 3>& scores, const std::array<double, 3>& weights) {
  const double total = weights[0] + weights[1] + weights[2];
  if (std::abs(total - 1.0) > 1e-9) {
    throw WeightError("class weights sum to " + std::to_string(total) + ", expected 1");
  }
  return weights[0] * scores[0] + weights[1] * scores[1] + weights[2] * scores[2];
}

SignificanceResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b) {
  if (scores_a.size() != scores_b.size()) throw ShapeError("paired_t_test: length mismatch");
  const std::size_t k = scores_a.size();
  if (k < 2) throw TooFewSamplesError("paired_t_test needs k >= 2 folds");

  SignificanceResult res;
  res.differences.resize(k);
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    res.differences[i] = scores_a[i] - scores_b[i];
    mean += res.differences[i];
  }
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (const double d : res.differences) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  if (sd == 0.0) {
    throw ZeroVarianceError("all per-fold differences are equal", mean);
  }
  res.t = mean / (sd / std::sqrt(static_cast<double>(k)));
  res.df = static_cast<int>(k) - 1;
  res.p = student_t_two_tailed(res.t, res.df);
  return res;
}

}  // namespace authprof
