#pragma once

#include <stdexcept>
#include <string>

namespace stabletp {

// Parameters outside the admissible set (bad alpha/rho pairs, malformed grids, ...).
struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation requested outside the mathematical domain of a function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// A series or quadrature did not reach the requested accuracy within its budget.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stabletp
