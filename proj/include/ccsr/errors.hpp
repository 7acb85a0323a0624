#pragma once

#include <stdexcept>
#include <string>

namespace ccsr {

// Concrete-syntax errors, with 1-based source position.
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int column_, const std::string& what_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(column_) + ": " + what_),
        line(line_), column(column_) {}
};

// Ill-formed input at the semantic level: unbound definitions, arity
// mismatches, guard violations, unsupported commit configurations.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unfolding a recursive definition exceeded the step budget, or a
// definition cycle was entered without consuming a prefix.
struct UnguardedRecursionError : ValidationError {
  using ValidationError::ValidationError;
};

// A state or event budget ran out; callers downgrade this to a partial
// result flagged as truncated.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ccsr
