#pragma once

#include <stdexcept>
#include <string>

namespace crackbem {

/// Argument outside the domain of a kernel or operator (singular point, |x| >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid construction argument (inadmissible material, bad mesh size, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Traction data is not orthogonal to the rigid motions.
class EquilibriumViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solve or fixed-point iteration did not reach its tolerance.
class SolveFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source point or crack is closer to the boundary than the accuracy contract allows.
class CrackTooCloseToBoundary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crackbem
