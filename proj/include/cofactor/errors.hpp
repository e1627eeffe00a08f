#pragma once

#include <stdexcept>
#include <string>

namespace cofactor {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied data or options (CLI exit code 2).
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

// Numerically singular / rank-deficient design matrix.
struct SingularDesign : Error {
  SingularDesign(const std::string& msg, double condition)
      : Error(msg + " (condition estimate " + std::to_string(condition) + ")"),
        condition_estimate(condition) {}
  double condition_estimate;
};

// Solver could not complete (CLI exit code 3).
struct SolverFailure : Error {
  explicit SolverFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace cofactor
