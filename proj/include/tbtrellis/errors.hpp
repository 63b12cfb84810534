#pragma once

#include <stdexcept>
#include <string>

namespace tbt {

/// Malformed input text (matrices, sequences, plans). Carries a 1-based
/// line/column of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error(what), line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Violated precondition or shape mismatch (dimensions, all-zero rows,
/// sequence lengths below the matrix memory, ...).
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested trellis reduction is not available: no column carries a
/// monomial factor, the reduced matrix fails to be canonical, or the
/// state space does not shrink.
class PlanError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would exceed the desk-scale budget.
class BudgetError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tbt
