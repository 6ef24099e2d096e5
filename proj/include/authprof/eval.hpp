#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "authprof/text.hpp"

namespace authprof {

/// Stratified k-fold partition: folds are disjoint, cover everything, and
/// per-class counts across folds differ by at most one.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> folds;  // indices into the dataset order

  std::vector<int> train_indices(int fold) const;
  const std::vector<int>& test_indices(int fold) const { return folds[static_cast<std::size_t>(fold)]; }
};

/// Throws TooFewSamplesError when any present class has fewer than k members.
FoldPlan make_folds(std::span<const Label> labels, int k, std::uint64_t seed);

/// Stratified (train, holdout) index split. The holdout gets
/// round(n * fraction) members, allocated per class by largest remainder,
/// capped so every class keeps at least one training member.
std::pair<std::vector<int>, std::vector<int>> stratified_holdout(std::span<const Label> labels,
                                                                 double fraction,
                                                                 std::uint64_t seed);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// One-vs-rest precision/recall/F1 for class c; 0/0 counts as 0.
ClassScores class_metrics(std::span<const Label> predictions, std::span<const Label> gold, Label c);

/// Class proportions of a label vector, in (racism, sexism, none) order.
std::array<double, 3> class_proportions(std::span<const Label> labels);

/// Proportions rounded to two decimals, the form the weights are reported in.
std::array<double, 3> rounded_weights(const std::array<double, 3>& weights);

/// w_r*s_r + w_s*s_s + w_n*s_n. Weights must sum to 1 within 1e-9
/// (WeightError otherwise). Averaging across folds is the caller's job.
double weighted_metric(const std::array<double, 3>& scores, const std::array<double, 3>& weights);

struct SignificanceResult {
  std::string method_a;
  std::string method_b;
  std::vector<double> differences;  // per fold, a - b
  double t = 0.0;
  int df = 0;
  double p = 1.0;
};

/// Paired t-test over aligned per-fold scores; two-tailed p with k-1 df.
/// Throws ZeroVarianceError when all differences are equal (its
/// `identical()` flag tells the all-zero case apart).
SignificanceResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b);

}  // namespace authprof
