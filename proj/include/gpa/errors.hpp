#pragma once

#include <stdexcept>
#include <string>

namespace gpa {

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroNormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonScalarLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CrossGraphEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  ParseError(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  long line_number;
};
struct MissingNodeLabels : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSplit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyFolds : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientBatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StratificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OracleTooExpensive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gpa
