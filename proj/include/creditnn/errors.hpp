#pragma once

#include <stdexcept>
#include <string>

namespace creditnn {

// Shape disagreement between an operand and what a layer or op expects.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (bad bounds, missing mapping entry, bad flag).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries the line number where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Key constraint violated (duplicate company/year/quarter and the like).
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown rating symbol or class index out of range.
struct LabelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Train/test allocation cannot be formed.
struct SplitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Empty or otherwise unusable data set.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values encountered during training.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation called out of order (backward before forward).
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Statistical design problem (empty cell, degenerate test).
struct DesignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate statistics input (all observations identical, both variances zero).
struct StatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace creditnn
