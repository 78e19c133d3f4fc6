#pragma once

#include <stdexcept>

namespace earlystop {

// Bad inputs, dimensions, or violated preconditions. CLI exit code 1
// (std::domain_error and std::invalid_argument map the same way).
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two routes that must agree disagreed beyond tolerance, or a residual that
// must vanish did not. CLI exit code 2.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace earlystop
