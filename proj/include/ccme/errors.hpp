// errors.hpp: exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace ccme {

/// Invalid or inconsistent parameters (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operator shapes that cannot be combined.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A transition frequency too close to zero for a formula that is singular there.
class DegenerateGapError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical procedure failed to reach its tolerance (CLI exit code 3).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Liouvillian kernel is not one-dimensional.
class DegenerateSteadyStateError : public ConvergenceError {
public:
    DegenerateSteadyStateError(const std::string& what, double smallest, double second)
        : ConvergenceError(what), smallest_singular_value(smallest),
          second_singular_value(second) {}

    double smallest_singular_value;
    double second_singular_value;
};

} // namespace ccme
