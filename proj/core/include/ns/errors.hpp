#pragma once

#include <stdexcept>
#include <string>

namespace ns {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller-supplied value violates a precondition (bad bounds, empty input,
/// out-of-order samples, out-of-bounds parameter, ...).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

/// A basis term was evaluated outside its time domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// An operation was invoked in the wrong state (e.g. prediction without a lock).
class StateError : public Error {
public:
    explicit StateError(const std::string& what) : Error(what) {}
};

/// The design matrix is numerically rank deficient beyond the accepted
/// condition limit. Carries the condition estimate from the pivoted QR.
class DegenerateDesignError : public Error {
public:
    DegenerateDesignError(const std::string& what, double condition)
        : Error(what), condition_estimate(condition) {}

    double condition_estimate;
};

}  // namespace ns
