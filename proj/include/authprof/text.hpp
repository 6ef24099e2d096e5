#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "authprof/graph.hpp"

namespace authprof {

enum class Label : int { racism = 0, sexism = 1, none = 2 };
inline constexpr int kNumClasses = 3;

/// Throws UnknownLabelError for anything outside {racism, sexism, none}.
Label parse_label(std::string_view s);
std::string_view label_name(Label l);

struct LabeledDocument {
  std::string doc_id;
  AuthorId author;
  std::string raw_text;
  std::vector<std::string> tokens;  // derived deterministically from raw_text
  Label label = Label::none;
};

using StopwordSet = std::unordered_set<std::string>;

/// The stopword list shipped with the repository (data/stopwords_en.txt).
const StopwordSet& default_stopwords();

StopwordSet load_stopwords(const std::string& path);

/// Lowercases, splits on whitespace, strips leading/trailing punctuation
/// (keeping '@' and '#' prefixes), then drops stopwords and empties.
/// Lowercasing is ASCII-only; multi-byte UTF-8 passes through untouched.
std::vector<std::string> normalize(std::string_view raw, const StopwordSet& stopwords);

/// Character n-grams, 1 <= n <= 4, over Unicode codepoints of the
/// space-joined token sequence. Built from training folds only; column
/// indices are dense and lexicographically sorted.
struct CharNgramVocabulary {
  std::map<std::string, int> index;
  int size() const { return static_cast<int>(index.size()); }
};

struct NgramOptions {
  bool from_raw_text = false;  // count grams over raw_text instead of normalized tokens
  int min_document_frequency = 1;
};

/// Throws EmptyCorpusError on an empty training set.
CharNgramVocabulary build_ngram_vocab(std::span<const LabeledDocument> train_docs,
                                      const NgramOptions& opts = {});

/// L2-normalized n-gram counts projected onto the vocabulary; the zero
/// vector when nothing matches.
Eigen::VectorXd char_ngram_features(std::span<const std::string> tokens,
                                    const CharNgramVocabulary& vocab);
Eigen::VectorXd char_ngram_features_text(std::string_view text, const CharNgramVocabulary& vocab);

/// Raw word-vector file contents: optional `<count> <dims>` header, then
/// `<token> <c1> ... <cd>` rows. Throws FormatError on ragged rows.
struct PretrainedVectors {
  std::vector<std::string> tokens;
  Eigen::MatrixXd rows;  // tokens.size() x dims
  int dims() const { return static_cast<int>(rows.cols()); }
};

PretrainedVectors load_word_vectors(const std::string& path);

/// Trainable token embedding table. Every training token has a row; unseen
/// tokens resolve to the dedicated OOV row. Rows not found in the pretrained
/// set start uniform in +-0.05, as does the OOV row.
struct WordEmbeddingTable {
  std::map<std::string, int> vocab;  // token -> row
  Eigen::MatrixXd rows;              // (|vocab| + 1) x dims, last row is OOV
  std::vector<bool> pretrained;      // row provenance: pretrained vs random

  int dims() const { return static_cast<int>(rows.cols()); }
  int oov_row() const { return static_cast<int>(rows.rows()) - 1; }
  int row_of(const std::string& token) const;
  Eigen::VectorXd vector_of(const std::string& token) const;
};

/// Builds the table over the distinct tokens of the training documents.
/// When `pretrained` is given its dimensionality wins and must match `dims`.
WordEmbeddingTable build_embedding_table(std::span<const LabeledDocument> train_docs,
                                         const PretrainedVectors* pretrained, int dims,
                                         std::uint64_t seed);

/// L2-normalized sum of token embeddings (OOV row for unknown tokens);
/// the zero vector for an empty sequence.
Eigen::VectorXd embedding_sum(std::span<const std::string> tokens, const WordEmbeddingTable& table);

}  // namespace authprof
