#include "aeiso/errors.hpp"

namespace aeiso {

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual)
    : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                            ", got " + std::to_string(actual)) {}

std::string_view to_string(MathErrorKind kind) {
  switch (kind) {
    case MathErrorKind::DegenerateSimplex:
      return "DegenerateSimplex";
    case MathErrorKind::NotDistancePreserving:
      return "NotDistancePreserving";
    case MathErrorKind::NumericalFailure:
      return "NumericalFailure";
    case MathErrorKind::Infeasible:
      return "Infeasible";
    case MathErrorKind::DegenerateAnchors:
      return "DegenerateAnchors";
    case MathErrorKind::InsufficientData:
      return "InsufficientData";
    case MathErrorKind::NoConsensus:
      return "NoConsensus";
    case MathErrorKind::DegenerateSupport:
      return "DegenerateSupport";
  }
  return "Unknown";
}

MathError::MathError(MathErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

ParseError::ParseError(std::size_t line, const std::string& detail)
    : std::runtime_error(line == 0 ? detail : "line " + std::to_string(line) + ": " + detail),
      line_(line) {}

}  // namespace aeiso
