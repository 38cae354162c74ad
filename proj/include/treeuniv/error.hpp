#pragma once

#include <stdexcept>
#include <string>

namespace treeuniv {

// Malformed arguments: out-of-range ids, violated preconditions, bad files.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// An exact enumeration would exceed its size guard.
class TooLargeError : public std::runtime_error {
 public:
  explicit TooLargeError(const std::string& what)
      : std::runtime_error("too large for exact mode: " + what) {}
};

// A randomized construction ran out of its retry budget.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace treeuniv
