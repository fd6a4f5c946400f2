#pragma once

#include <stdexcept>
#include <string>

namespace metroflow {

// Invalid user-supplied configuration or file contents (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a numerical routine.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Simulation safety violation: two trains overlap or overtake.
class CollisionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Numerical failure inside an estimator (non-finite likelihood, singular system).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Not enough data for the requested statistic.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace metroflow
