#pragma once

#include <stdexcept>
#include <string>

namespace affwalk {

// A value lies outside the algebraic domain an operation is defined on
// (e.g. a linear coefficient that is not a unit of the prime context).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// User-supplied configuration is malformed or inconsistent.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A computation exceeded a configured size budget.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative approximation failed to stabilize within its horizon.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace affwalk
