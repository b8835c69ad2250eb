#pragma once

#include <stdexcept>
#include <string>

namespace flyby {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates the invariant of a domain type (negative radius, NaN phase, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed network topology: undeclared modes, duplicate names,
/// single-assignment violations.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Norm leakage, non-unitary elements, overflowing estimates.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid scenario configuration. The message is prefixed with the key path.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace flyby
