#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

/// Invalid physical or numerical parameters (e.g. a root finder that does not converge).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tabulation or other construction step could not meet its accuracy target.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (below the horizon, non-positive field, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Least-squares decay fit on unusable data.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace imcf
