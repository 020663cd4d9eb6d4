#pragma once

#include <stdexcept>
#include <string>

namespace cavmag {

/// Argument outside the mathematical domain of an operation (e.g. zero frequency).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine failed or produced a result that does not meet its own checks.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The drift matrix has no asymptotically stable fixed point.
class NoSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Malformed configuration, sweep specification or command-line request.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace cavmag
