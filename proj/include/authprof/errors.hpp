#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace authprof {

enum class ErrorKind {
  io,
  format,
  config,
  self_loop,
  unknown_author,
  degenerate_graph,
  unknown_label,
  empty_corpus,
  degenerate_labels,
  degenerate_split,
  shape,
  weight,
  zero_variance,
  too_few_samples,
  degenerate_input,
};

/// Base for all library errors; carries a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct IoError : Error {
  explicit IoError(std::string m) : Error(ErrorKind::io, std::move(m)) {}
};
struct FormatError : Error {
  explicit FormatError(std::string m) : Error(ErrorKind::format, std::move(m)) {}
};
struct ConfigError : Error {
  explicit ConfigError(std::string m) : Error(ErrorKind::config, std::move(m)) {}
};
struct SelfLoopError : Error {
  explicit SelfLoopError(std::string m) : Error(ErrorKind::self_loop, std::move(m)) {}
};
struct UnknownAuthorError : Error {
  explicit UnknownAuthorError(std::string m) : Error(ErrorKind::unknown_author, std::move(m)) {}
};
struct DegenerateGraphError : Error {
  explicit DegenerateGraphError(std::string m) : Error(ErrorKind::degenerate_graph, std::move(m)) {}
};
struct UnknownLabelError : Error {
  explicit UnknownLabelError(std::string m) : Error(ErrorKind::unknown_label, std::move(m)) {}
};
struct EmptyCorpusError : Error {
  explicit EmptyCorpusError(std::string m) : Error(ErrorKind::empty_corpus, std::move(m)) {}
};
struct DegenerateLabelsError : Error {
  explicit DegenerateLabelsError(std::string m) : Error(ErrorKind::degenerate_labels, std::move(m)) {}
};
struct DegenerateSplitError : Error {
  explicit DegenerateSplitError(std::string m) : Error(ErrorKind::degenerate_split, std::move(m)) {}
};
struct ShapeError : Error {
  explicit ShapeError(std::string m) : Error(ErrorKind::shape, std::move(m)) {}
};
struct WeightError : Error {
  explicit WeightError(std::string m) : Error(ErrorKind::weight, std::move(m)) {}
};

/// All pairwise score differences are equal. `identical` distinguishes the
/// all-zero case (methods agree on every fold) from a constant nonzero shift.
struct ZeroVarianceError : Error {
  ZeroVarianceError(std::string m, double mean_difference)
      : Error(ErrorKind::zero_variance, std::move(m)), mean_difference(mean_difference) {}
  double mean_difference = 0.0;
  bool identical() const noexcept { return mean_difference == 0.0; }
};

struct TooFewSamplesError : Error {
  explicit TooFewSamplesError(std::string m) : Error(ErrorKind::too_few_samples, std::move(m)) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(std::string m) : Error(ErrorKind::degenerate_input, std::move(m)) {}
};

}  // namespace authprof
