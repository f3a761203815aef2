#pragma once

#include <stdexcept>
#include <string>

namespace bctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed states, out-of-range parameters, unparsable specs.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a time integration (overflow, NaN, stability limit).
class SolverError : public Error {
public:
    SolverError(const std::string& what, double time)
        : Error(what), time_(time) {}

    /// Model time at which the run was rejected.
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// An iterative procedure ran out of budget before meeting its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace bctl
