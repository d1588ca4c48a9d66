#pragma once

#include <stdexcept>
#include <string>

namespace loccache {

// Raised when an enumeration or row-generation guard would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structural invariant failed; `invariant()` names which one.
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::logic_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

// A user failed to recover its file. Always a scheme bug.
class DecodeFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A converse certificate was requested for a regime whose mixing weight
// leaves the admissible interval.
class RegimeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace loccache
