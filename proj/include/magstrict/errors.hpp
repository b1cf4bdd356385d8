#ifndef MAGSTRICT_ERRORS_HPP
#define MAGSTRICT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace magstrict {

/// Bad run configuration or malformed input file (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mesh file parse failure; carries the 1-based line number.
struct MeshIoError : std::runtime_error {
    MeshIoError(const std::string& msg, long line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

/// Iterative solver did not meet its residual contract (CLI exit code 3).
struct SolverError : std::runtime_error {
    SolverError(const std::string& msg, double residual, int iterations)
        : std::runtime_error(msg + " [residual=" + std::to_string(residual) +
                             ", iterations=" + std::to_string(iterations) + "]"),
          residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// A discrete-state invariant was violated (CLI exit code 4).
struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace magstrict

#endif
