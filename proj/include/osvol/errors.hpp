#pragma once

#include <stdexcept>
#include <string>

namespace osvol {

// Failure of an iterative numeric routine (root finding, continued
// fractions, CF inversion). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the progressive classification has flagged every remaining
// observation, so no threshold (and no variance estimate) can be formed.
class DegenerateScheduleError : public std::domain_error {
public:
  explicit DegenerateScheduleError(const std::string& what)
      : std::domain_error(what) {}
};

}  // namespace osvol
