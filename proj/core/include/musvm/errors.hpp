#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace musvm {

/// Bad user input: malformed files, shape mismatches, invalid parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (singular system, non-positive curvature).
/// Carries a condition estimate when the failing routine has one.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double condition_estimate = std::nan(""))
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace musvm
