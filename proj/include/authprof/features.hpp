#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace authprof {

enum class FeatureKind { ngram, hidden_state, embedding_sum, author_profile };

std::string feature_kind_name(FeatureKind k);

struct FeatureBlock {
  FeatureKind kind;
  int offset = 0;
  int width = 0;
};

/// Dense row-per-document feature matrix with column provenance. All rows
/// share one width; featurizers never emit NaN/Inf.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<FeatureBlock> blocks;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  bool is_concatenation() const { return blocks.size() > 1; }
  bool has_block(FeatureKind k) const;

  static FeatureMatrix from(FeatureKind kind, Eigen::MatrixXd m);
};

/// Column-wise concatenation preserving provenance; rows must align
/// (same documents in the same order). Throws ShapeError.
FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b);

/// Throws ShapeError if any entry is NaN or infinite.
void check_finite(const FeatureMatrix& m, const std::string& what);

}  // namespace authprof
