#pragma once

#include <stdexcept>
#include <string>

namespace cuspflow {

/// Precondition or domain violation (bad radius, bad parameter, mismatched grids).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Implicit solve failed: Newton did not converge or dt underflowed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration could not be read or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cuspflow
