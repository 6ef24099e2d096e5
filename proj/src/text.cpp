#include "authprof/text.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "authprof/errors.hpp"
#include "authprof/rng.hpp"
#include "authprof/util.hpp"

namespace authprof {

Label parse_label(std::string_view s) {
  if (s == "racism") return Label::racism;
  if (s == "sexism") return Label::sexism;
  if (s == "none") return Label::none;
  throw UnknownLabelError("unknown label '" + std::string(s) + "'");
}

std::string_view label_name(Label l) {
  switch (l) {
    case Label::racism: return "racism";
    case Label::sexism: return "sexism";
    case Label::none: return "none";
  }
  return "?";
}

StopwordSet load_stopwords(const std::string& path) {
  StopwordSet set;
  for (const auto& line : read_lines(path)) {
    const std::string w = strip(line);
    if (!w.empty() && w[0] != '#') set.insert(w);
  }
  return set;
}

namespace {

bool is_ascii_punct(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return (u >= '!' && u <= '/') || (u >= ':' && u <= '@') || (u >= '[' && u <= '`') ||
         (u >= '{' && u <= '~');
}

std::string strip_token(std::string_view tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e && is_ascii_punct(tok[b]) && tok[b] != '@' && tok[b] != '#') ++b;
  while (e > b && is_ascii_punct(tok[e - 1])) --e;
  // trailing strip may have eaten a lone '@'/'#'; that is fine, the prefix
  // rule only protects markers that still introduce a token
  return std::string(tok.substr(b, e - b));
}

}  // namespace

std::vector<std::string> normalize(std::string_view raw, const StopwordSet& stopwords) {
  std::string lowered(raw);
  for (auto& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < lowered.size()) {
    while (i < lowered.size() && is_space(lowered[i])) ++i;
    std::size_t j = i;
    while (j < lowered.size() && !is_space(lowered[j])) ++j;
    if (j > i) {
      std::string tok = strip_token(std::string_view(lowered).substr(i, j - i));
      if (!tok.empty() && stopwords.count(tok) == 0) out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

namespace {

// Byte offsets of UTF-8 codepoint starts; malformed bytes count as single
// codepoints so the scan never stalls.
std::vector<std::size_t> codepoint_starts(std::string_view s) {
  std::vector<std::size_t> starts;
  starts.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    starts.push_back(i);
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    for (std::size_t k = 1; k < len; ++k) {
      if (i + k >= s.size() || (static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
  }
  starts.push_back(s.size());
  return starts;
}

template <class Fn>
void for_each_ngram(std::string_view text, Fn&& fn) {
  const auto starts = codepoint_starts(text);
  const std::size_t n_cp = starts.size() - 1;
  for (std::size_t i = 0; i < n_cp; ++i) {
    for (std::size_t n = 1; n <= 4 && i + n <= n_cp; ++n) {
      fn(text.substr(starts[i], starts[i + n] - starts[i]));
    }
  }
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string joined;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) joined += ' ';
    joined += tokens[i];
  }
  return joined;
}

}  // namespace

CharNgramVocabulary build_ngram_vocab(std::span<const LabeledDocument> train_docs,
                                      const NgramOptions& opts) {
  if (train_docs.empty()) throw EmptyCorpusError("cannot build n-gram vocabulary from no documents");
  std::map<std::string, int> doc_freq;
  for (const auto& doc : train_docs) {
    const std::string text = opts.from_raw_text ? doc.raw_text : join_tokens(doc.tokens);
    std::unordered_set<std::string_view> seen;
    for_each_ngram(text, [&](std::string_view g) { seen.insert(g); });
    for (const auto& g : seen) ++doc_freq[std::string(g)];
  }
  CharNgramVocabulary vocab;
  int next = 0;
  for (const auto& [gram, df] : doc_freq) {
    if (df >= opts.min_document_frequency) vocab.index.emplace(gram, next++);
  }
  return vocab;
}

Eigen::VectorXd char_ngram_features_text(std::string_view text, const CharNgramVocabulary& vocab) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(vocab.size());
  for_each_ngram(text, [&](std::string_view g) {
    auto it = vocab.index.find(std::string(g));
    if (it != vocab.index.end()) v[it->second] += 1.0;
  });
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

Eigen::VectorXd char_ngram_features(std::span<const std::string> tokens,
                                    const CharNgramVocabulary& vocab) {
  return char_ngram_features_text(join_tokens(tokens), vocab);
}

PretrainedVectors load_word_vectors(const std::string& path) {
  const auto lines = read_lines(path);
  PretrainedVectors pv;
  std::vector<std::vector<double>> rows;
  int dims = -1;
  std::size_t start = 0;
  if (!lines.empty()) {
    const auto head = split_whitespace(lines[0]);
    if (head.size() == 2) {
      char* e1 = nullptr;
      char* e2 = nullptr;
      std::strtol(head[0].c_str(), &e1, 10);
      std::strtol(head[1].c_str(), &e2, 10);
      if (*e1 == '\0' && *e2 == '\0') start = 1;  // `<count> <dims>` header
    }
  }
  for (std::size_t i = start; i < lines.size(); ++i) {
    if (strip(lines[i]).empty()) continue;
    const auto fields = split_whitespace(lines[i]);
    if (fields.size() < 2) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": expected token and components");
    }
    const int d = static_cast<int>(fields.size()) - 1;
    if (dims < 0) dims = d;
    if (d != dims) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": row has " + std::to_string(d) +
                        " components, expected " + std::to_string(dims));
    }
    pv.tokens.push_back(fields[0]);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
      row[static_cast<std::size_t>(c)] =
          parse_double(fields[static_cast<std::size_t>(c) + 1], path + ":" + std::to_string(i + 1));
    }
    rows.push_back(std::move(row));
  }
  pv.rows.resize(static_cast<Eigen::Index>(rows.size()), std::max(dims, 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < dims; ++c) {
      pv.rows(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return pv;
}

int WordEmbeddingTable::row_of(const std::string& token) const {
  auto it = vocab.find(token);
  return it == vocab.end() ? oov_row() : it->second;
}

Eigen::VectorXd WordEmbeddingTable::vector_of(const std::string& token) const {
  return rows.row(row_of(token));
}

WordEmbeddingTable build_embedding_table(std::span<const LabeledDocument> train_docs,
                                         const PretrainedVectors* pretrained, int dims,
                                         std::uint64_t seed) {
  if (pretrained && pretrained->dims() != dims) {
    throw ConfigError("pretrained vectors are " + std::to_string(pretrained->dims()) +
                      "-dimensional, config asks for " + std::to_string(dims));
  }
  WordEmbeddingTable table;
  for (const auto& doc : train_docs) {
    for (const auto& tok : doc.tokens) table.vocab.emplace(tok, 0);
  }
  int next = 0;
  for (auto& [tok, row] : table.vocab) row = next++;

  std::unordered_map<std::string, int> pre_index;
  if (pretrained) {
    pre_index.reserve(pretrained->tokens.size());
    for (std::size_t i = 0; i < pretrained->tokens.size(); ++i) {
      pre_index.emplace(pretrained->tokens[i], static_cast<int>(i));
    }
  }

  const int n_rows = next + 1;  // + OOV
  table.rows.resize(n_rows, dims);
  table.pretrained.assign(static_cast<std::size_t>(n_rows), false);
  Rng rng(seed);
  for (const auto& [tok, row] : table.vocab) {
    auto it = pre_index.find(tok);
    if (it != pre_index.end()) {
      table.rows.row(row) = pretrained->rows.row(it->second);
      table.pretrained[static_cast<std::size_t>(row)] = true;
    } else {
      for (int c = 0; c < dims; ++c) table.rows(row, c) = rng.uniform(-0.05, 0.05);
    }
  }
  for (int c = 0; c < dims; ++c) table.rows(n_rows - 1, c) = rng.uniform(-0.05, 0.05);
  return table;
}

Eigen::VectorXd embedding_sum(std::span<const std::string> tokens, const WordEmbeddingTable& table) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dims());
  if (tokens.empty()) return sum;
  for (const auto& tok : tokens) sum += table.rows.row(table.row_of(tok)).transpose();
  const double norm = sum.norm();
  if (norm > 0.0) sum /= norm;
  return sum;
}

}  // namespace authprof
