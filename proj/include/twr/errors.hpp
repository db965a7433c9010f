#pragma once

#include <stdexcept>
#include <string>

namespace twr {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (bad config, out-of-range skew, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An interval used as a divisor is zero or negative.
class DegenerateInterval : public Error {
public:
    using Error::Error;
};

/// The Fisher information matrix is numerically singular.
class SingularInformation : public Error {
public:
    using Error::Error;
};

class NoPositiveRoot : public Error {
public:
    using Error::Error;
};

/// A ranging session is too short to hold a single transaction.
class ZeroMeasurements : public Error {
public:
    using Error::Error;
};

}  // namespace twr
