#pragma once

#include <stdexcept>
#include <string>

namespace tbeta {

// Base for every error raised by the library. The C API maps each subclass to
// a distinct status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or configuration (bad shape, support, FAR, B, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Observations that cannot be used: outside the support, degenerate,
// unparsable, or not partitionable into subgroups.
class DataError : public Error {
public:
    using Error::Error;
};

// An iterative method hit its cap or a normalizer underflowed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace tbeta
