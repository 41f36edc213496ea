#pragma once

#include <stdexcept>
#include <string>

namespace acm {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: empty required fields, inconsistent state,
/// unknown backend or config key names.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed external data (dataset files, transcripts, config files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A pluggable backend failed (remote unreachable, bad status, malformed
/// response). Fatal for the operation that invoked the backend.
class BackendError : public Error {
public:
    using Error::Error;
};

/// The context cannot fit the token budget no matter how much history is
/// demoted. Carries the name of the segment that made it unfittable.
class BudgetOverflowError : public Error {
public:
    BudgetOverflowError(const std::string& segment, const std::string& message)
        : Error(message), segment_(segment) {}

    const std::string& oversized_segment() const { return segment_; }

private:
    std::string segment_;
};

/// Filesystem failure (unreadable or unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace acm
