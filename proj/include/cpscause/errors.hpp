#pragma once

#include <stdexcept>
#include <string>

namespace cpscause {

// Bad argument relative to a domain (unknown variable, interval outside span).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caller broke a precondition (overlapping slices, misaligned grids, ...).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};

// Arithmetic failure during pointwise evaluation; carries the offending time.
struct EvalError : std::runtime_error {
    std::string reason;
    double time;
    EvalError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t=" + std::to_string(t)), reason(msg), time(t) {}
};

struct SimulationError : std::runtime_error {
    double time;
    SimulationError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t=" + std::to_string(t)), time(t) {}
};

struct BoundsError : std::runtime_error {
    std::string variable;
    double time;
    BoundsError(const std::string& var, double t, double value)
        : std::runtime_error("value " + std::to_string(value) + " of '" + var +
                             "' out of bounds at t=" + std::to_string(t)),
          variable(var), time(t) {}
};

struct ContextError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeterminismError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cpscause
