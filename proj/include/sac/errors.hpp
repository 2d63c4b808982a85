#pragma once

#include <stdexcept>
#include <string>

namespace sac {

/// Malformed symbolic expression or mismatched grid structure.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (e.g. test-function scale).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested scale cannot be represented on the grid. Carries the minimal
/// feasible resolution (or the minimal feasible epsilon for schedules).
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation not defined for the requested dimension or order.
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration detected before any numerics ran (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerics ran but failed (blowup-dominated run, no convergence; exit code 3).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sac
