#pragma once

#include <stdexcept>
#include <string>

namespace cfld {

// Argument outside the domain of an operation (x outside (0,1), bad exponent, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A digit word ran out before the quantity it was asked for was determined.
class InsufficientDigits : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a request exceeds a configured work budget (enumeration cap,
// operator iteration budget). The caller asked for something we will not do.
class Refused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Farey orbit was absorbed at 0 before the requested entry/return resolved.
class UnresolvedOrbit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfld
