#pragma once

#include <stdexcept>

namespace semilag {

/// Invalid configuration, arguments, or input files. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration or run would exceed its configured work budget.
/// Treated as a configuration problem (pick a smaller instance or raise
/// the budget), so it also maps to CLI exit code 2.
struct BudgetError : ConfigError {
  using ConfigError::ConfigError;
};

/// A mathematical precondition of an algorithm is violated, e.g. the
/// discount step bound dt <= 1/(2*lambda). CLI exit code 3.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A point left the grid box under the rejecting boundary policy.
struct DomainError : PreconditionError {
  using PreconditionError::PreconditionError;
};

/// An empirical check (order of convergence, equivalence, bound) failed.
/// CLI exit code 4.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace semilag
