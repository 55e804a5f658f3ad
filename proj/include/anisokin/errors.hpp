#pragma once

#include <stdexcept>
#include <string>

namespace anisokin {

// Inconsistent shapes, mismatched grids, malformed traces.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value outside its admissible range (nonpositive constant, unknown preset, ...).
struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver did not reach the requested tolerance.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), final_residual(residual), iterations(iterations) {}
    double final_residual;
    int iterations;
};

// A step-level rejection (CFL bound, Picard stagnation). Carries the largest
// admissible dt when the rejection is a time-step bound, else 0.
struct StepError : std::runtime_error {
    StepError(const std::string& what, double admissible_dt = 0.0)
        : std::runtime_error(what), max_admissible_dt(admissible_dt) {}
    double max_admissible_dt;
};

// A runtime audit found a state violating a scheme invariant.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration file problems; line = 0 when not tied to a specific line.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(what), line(line) {}
    int line;
};

// Spectral decomposition outside tolerance (negative eigenvalue, etc.).
struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace anisokin
