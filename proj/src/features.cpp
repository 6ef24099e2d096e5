#include "authprof/features.hpp"

#include "authprof/errors.hpp"

namespace authprof {

std::string feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::ngram: return "ngram";
    case FeatureKind::hidden_state: return "hidden_state";
    case FeatureKind::embedding_sum: return "embedding_sum";
    case FeatureKind::author_profile: return "author_profile";
  }
  return "?";
}

bool FeatureMatrix::has_block(FeatureKind k) const {
  for (const auto& b : blocks) {
    if (b.kind == k) return true;
  }
  return false;
}

FeatureMatrix FeatureMatrix::from(FeatureKind kind, Eigen::MatrixXd m) {
  FeatureMatrix out;
  out.blocks.push_back({kind, 0, static_cast<int>(m.cols())});
  out.values = std::move(m);
  return out;
}

FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("concat_features: row counts differ (" + std::to_string(a.rows()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  FeatureMatrix out;
  out.values.resize(a.values.rows(), a.values.cols() + b.values.cols());
  out.values << a.values, b.values;
  out.blocks = a.blocks;
  for (auto blk : b.blocks) {
    blk.offset += a.cols();
    out.blocks.push_back(blk);
  }
  return out;
}

void check_finite(const FeatureMatrix& m, const std::string& what) {
  if (!m.values.allFinite()) throw ShapeError(what + ": feature matrix contains NaN/Inf");
}

}  // namespace authprof
