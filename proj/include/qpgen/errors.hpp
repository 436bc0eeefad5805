#pragma once

#include <stdexcept>
#include <string>

namespace qpgen {

/// Argument outside the mathematical domain of a function (e.g. K(m) for m >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid caller-supplied argument (nonpositive tolerance, bad truncation, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Precondition on structured input violated (non-Hermitian matrix, c1 + c2 != 1, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested problem exceeds a configured size limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed or produced an inadmissible result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpgen
