// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace copplace {

/// Malformed input text (case files, program dumps). Carries a 1-based
/// line number when one is known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Structurally valid input that violates a model invariant
/// (disconnected grid, bad dimensions, out-of-range entries).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular factorization, indefinite matrix where a
/// PSD one is required, non-finite values.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimization problem has no (strictly) feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string msg, int block = -1)
      : std::runtime_error(std::move(msg)), block_(block) {}
  /// Index of the first violated/binding constraint block, -1 if unknown.
  int block() const { return block_; }

 private:
  int block_;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace copplace
