#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aeiso {

/// Raised when two operands live in spaces of different dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual);
};

/// Failure classes of the geometric pipeline. These are outcomes of the
/// mathematics (the data admits no answer), not programming errors.
enum class MathErrorKind {
  DegenerateSimplex,
  NotDistancePreserving,
  NumericalFailure,
  Infeasible,
  DegenerateAnchors,
  InsufficientData,
  NoConsensus,
  DegenerateSupport,
};

std::string_view to_string(MathErrorKind kind);

class MathError : public std::runtime_error {
 public:
  MathError(MathErrorKind kind, const std::string& detail);

  MathErrorKind kind() const noexcept { return kind_; }

 private:
  MathErrorKind kind_;
};

/// Malformed input file or document. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace aeiso
