#pragma once
#include <stdexcept>
#include <string>

namespace xdiff {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched grids, malformed fields, broken file headers.
struct StructuralError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Iterative solver failed to reach its tolerance; carries the last residual.
struct IterationError : Error {
    double residual;
    int iterations;
    IterationError(const std::string& what, double res, int iters)
        : Error(what), residual(res), iterations(iters) {}
};

// Stable time step fell below dt_min.
struct StiffnessError : Error {
    using Error::Error;
};

// An explicit update produced a negative density; the caller may retry with
// a smaller step.
struct PositivityViolation : Error {
    double min_value;
    explicit PositivityViolation(const std::string& what, double mv)
        : Error(what), min_value(mv) {}
};

struct ConfigError : Error {
    int line;
    ConfigError(const std::string& what, int line_no) : Error(what), line(line_no) {}
};

}  // namespace xdiff
