#include <doctest.h>

#include <cmath>
#include <fstream>

#include "authprof/errors.hpp"
#include "authprof/text.hpp"
#include "authprof/util.hpp"

using namespace authprof;

namespace {

LabeledDocument doc_with_tokens(std::vector<std::string> tokens) {
  LabeledDocument d;
  d.doc_id = "d";
  d.author = "a";
  d.tokens = std::move(tokens);
  return d;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

}  // namespace

TEST_CASE("normalize lowercases, strips punctuation, drops stopwords") {
  CHECK(normalize("The THE the", {"the"}).empty());
  CHECK(normalize("Women are EQUAL", {"are"}) == std::vector<std::string>{"women", "equal"});
  CHECK(normalize("", {}).empty());
  CHECK(normalize("  \t \n ", {}).empty());
  CHECK(normalize("Hello, world!", {}) == std::vector<std::string>{"hello", "world"});
  CHECK(normalize("@User: (#Tag). !!!", {}) == std::vector<std::string>{"@user", "#tag"});
  CHECK(normalize("don't stop", {}) == std::vector<std::string>{"don't", "stop"});
  // multi-byte text passes through unsplit
  CHECK(normalize("caf\xc3\xa9 time", {}) == std::vector<std::string>{"caf\xc3\xa9", "time"});
}

TEST_CASE("normalize is idempotent over its own output") {
  const StopwordSet& sw = default_stopwords();
  for (const char* raw : {"The quick brown fox, JUMPED!", "@you aren't #here...", "a b c d the\n"}) {
    const auto once = normalize(raw, sw);
    const auto twice = normalize(join(once), sw);
    CHECK(once == twice);
  }
}

TEST_CASE("shipped stopword file matches the builtin list") {
  const StopwordSet from_file = load_stopwords(std::string(AUTHPROF_SOURCE_DIR) + "/data/stopwords_en.txt");
  CHECK(from_file == default_stopwords());
}

TEST_CASE("char n-gram counts over 'abc' with its full vocabulary") {
  const auto docs = std::vector<LabeledDocument>{doc_with_tokens({"abc"})};
  const auto vocab = build_ngram_vocab(docs);
  // grams of "abc": a, b, c, ab, bc, abc
  CHECK(vocab.size() == 6);
  const auto v = char_ngram_features(docs[0].tokens, vocab);
  for (int i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(6.0)));
}

TEST_CASE("char n-grams of 'aaaa' count 4,3,2,1 and normalize to unit length") {
  const auto docs = std::vector<LabeledDocument>{doc_with_tokens({"aaaa"})};
  const auto vocab = build_ngram_vocab(docs);
  CHECK(vocab.size() == 4);
  const auto v = char_ngram_features(docs[0].tokens, vocab);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // lexicographic columns: a, aa, aaa, aaaa
  const double norm = std::sqrt(16.0 + 9.0 + 4.0 + 1.0);
  CHECK(v[vocab.index.at("a")] == doctest::Approx(4.0 / norm));
  CHECK(v[vocab.index.at("aa")] == doctest::Approx(3.0 / norm));
  CHECK(v[vocab.index.at("aaa")] == doctest::Approx(2.0 / norm));
  CHECK(v[vocab.index.at("aaaa")] == doctest::Approx(1.0 / norm));
}

TEST_CASE("empty token list featurizes to the zero vector") {
  const auto docs = std::vector<LabeledDocument>{doc_with_tokens({"abc"})};
  const auto vocab = build_ngram_vocab(docs);
  const std::vector<std::string> empty;
  CHECK(char_ngram_features(empty, vocab).isZero());
}

TEST_CASE("vocabulary building is deterministic and train-only") {
  const std::vector<LabeledDocument> train{doc_with_tokens({"ab"}), doc_with_tokens({"cd"})};
  const auto v1 = build_ngram_vocab(train);
  const auto v2 = build_ngram_vocab(train);
  CHECK(v1.index == v2.index);

  // a gram that only occurs in test data contributes nothing
  const auto feat = char_ngram_features(std::vector<std::string>{"zz"}, v1);
  CHECK(feat.isZero());

  CHECK_THROWS_AS(static_cast<void>(build_ngram_vocab({})), EmptyCorpusError);
}

TEST_CASE("space is part of the gram alphabet and min_df prunes") {
  const std::vector<LabeledDocument> train{doc_with_tokens({"a", "b"}), doc_with_tokens({"a", "c"})};
  const auto vocab = build_ngram_vocab(train);
  CHECK(vocab.index.count("a b") == 1);
  NgramOptions opts;
  opts.min_document_frequency = 2;
  const auto pruned = build_ngram_vocab(train, opts);
  CHECK(pruned.index.count("a") == 1);    // in both docs
  CHECK(pruned.index.count("b") == 0);    // only in one
  CHECK(pruned.size() < vocab.size());
}

TEST_CASE("word-vector files parse, flag provenance, and round-trip at 6 digits") {
  const std::string path = "/tmp/authprof_test_vectors.txt";
  {
    std::ofstream out(path);
    out << "3 4\n";
    out << "alpha 0.123456 -1.25 0.5 2\n";
    out << "beta 1 2 3 4\n";
    out << "gamma -0.00123456 0 0 1e-3\n";
  }
  const auto pv = load_word_vectors(path);
  CHECK(pv.tokens == std::vector<std::string>{"alpha", "beta", "gamma"});
  CHECK(pv.dims() == 4);
  CHECK(pv.rows(0, 1) == doctest::Approx(-1.25));

  // printing back at 6 significant digits reproduces the file values
  CHECK(format_g6(pv.rows(0, 0)) == "0.123456");
  CHECK(format_g6(pv.rows(2, 0)) == "-0.00123456");

  const std::vector<LabeledDocument> train{doc_with_tokens({"alpha", "gamma", "novel"})};
  const auto table = build_embedding_table(train, &pv, 4, 99);
  CHECK(table.vocab.size() == 3);
  CHECK(table.rows.rows() == 4);  // 3 tokens + OOV
  CHECK(table.pretrained[static_cast<std::size_t>(table.vocab.at("alpha"))]);
  CHECK(table.pretrained[static_cast<std::size_t>(table.vocab.at("gamma"))]);
  CHECK_FALSE(table.pretrained[static_cast<std::size_t>(table.vocab.at("novel"))]);
  CHECK_FALSE(table.pretrained[static_cast<std::size_t>(table.oov_row())]);
  CHECK(table.rows.row(table.vocab.at("alpha"))[1] == doctest::Approx(-1.25));
  for (int c = 0; c < 4; ++c) {
    CHECK(std::abs(table.rows(table.vocab.at("novel"), c)) <= 0.05);
    CHECK(std::abs(table.rows(table.oov_row(), c)) <= 0.05);
  }

  {
    std::ofstream out(path);
    out << "alpha 1 2\n";
    out << "beta 1 2 3\n";  // ragged
  }
  CHECK_THROWS_AS(static_cast<void>(load_word_vectors(path)), FormatError);
}

TEST_CASE("random-only embedding tables stay inside +-0.05") {
  const std::vector<LabeledDocument> train{doc_with_tokens({"x", "y", "z"})};
  const auto table = build_embedding_table(train, nullptr, 8, 3);
  CHECK(table.rows.rows() == 4);
  CHECK(table.rows.maxCoeff() <= 0.05);
  CHECK(table.rows.minCoeff() >= -0.05);
  for (const bool flag : table.pretrained) CHECK_FALSE(flag);
  // same seed, same table
  const auto again = build_embedding_table(train, nullptr, 8, 3);
  CHECK(table.rows == again.rows);
}

TEST_CASE("embedding_sum normalizes, handles OOV and empty input") {
  const std::vector<LabeledDocument> train{doc_with_tokens({"one", "two"})};
  auto table = build_embedding_table(train, nullptr, 6, 5);

  const std::vector<std::string> single{"one"};
  const auto v = embedding_sum(single, table);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd expect = table.rows.row(table.vocab.at("one")).transpose();
  expect /= expect.norm();
  CHECK((v - expect).norm() == doctest::Approx(0.0));

  const std::vector<std::string> empty;
  CHECK(embedding_sum(empty, table).isZero());

  // two tokens: direct recomputation
  const std::vector<std::string> both{"one", "two"};
  Eigen::VectorXd sum = table.rows.row(table.vocab.at("one")) + table.rows.row(table.vocab.at("two"));
  sum /= sum.norm();
  CHECK((embedding_sum(both, table) - sum).norm() < 1e-15);

  // unknown tokens hit the OOV row, never a fresh one
  const std::vector<std::string> unknown{"never-seen"};
  Eigen::VectorXd oov = table.rows.row(table.oov_row()).transpose();
  oov /= oov.norm();
  CHECK((embedding_sum(unknown, table) - oov).norm() < 1e-15);
}

TEST_CASE("non-zero feature vectors have unit norm") {
  const std::vector<LabeledDocument> train{doc_with_tokens({"alpha", "beta", "gamma", "delta"}),
                                           doc_with_tokens({"epsilon", "zeta"})};
  const auto vocab = build_ngram_vocab(train);
  const auto table = build_embedding_table(train, nullptr, 12, 17);
  for (const auto& doc : train) {
    const auto ng = char_ngram_features(doc.tokens, vocab);
    const auto es = embedding_sum(doc.tokens, table);
    CHECK(std::abs(ng.norm() - 1.0) < 1e-9);
    CHECK(std::abs(es.norm() - 1.0) < 1e-9);
  }
}
