#pragma once

#include <stdexcept>
#include <string>

namespace hnp {

/// Malformed or out-of-domain arguments (bad group specs, dimension mismatch,
/// non-prime moduli, subgroups of the wrong ambient group).
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A structural precondition of an operation does not hold for its input.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A configured size or time budget was exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A ratio was requested whose denominator is zero.
class UndefinedRatio : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace hnp
