#pragma once

#include <stdexcept>
#include <string>

namespace parobs {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The observability matrix is rank deficient.
class NotObservable : public Error {
public:
    using Error::Error;
};

/// Operation requires a shape the implementation does not support
/// (e.g. pole placement for multi-output systems).
class UnsupportedShape : public Error {
public:
    using Error::Error;
};

/// Null-space solve for an eigenvector failed; the matrix is (near) defective.
class DegenerateEigenvector : public Error {
public:
    using Error::Error;
};

/// An implicit Euler step hit a singular resolvent factor.
class SingularStep : public Error {
public:
    using Error::Error;
};

/// The coarse propagator is not a contraction (eta >= 1).
class DivergentCoarse : public Error {
public:
    using Error::Error;
};

/// The truncation-constant formula requires dT * K < 1.
class StabilityViolation : public Error {
public:
    using Error::Error;
};

/// The stop rule never fired within the finite-termination budget.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// An efficiency report was requested on a trace shorter than its horizon.
class IncompleteTrace : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or system file.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// A configuration or system file contains a key the schema does not define.
class UnknownKey : public Error {
public:
    explicit UnknownKey(const std::string& key)
        : Error("unknown key: " + key), key(key) {}
    std::string key;
};

}  // namespace parobs
