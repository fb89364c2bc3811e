#pragma once

#include <stdexcept>
#include <string>

namespace evolveq {

/// Malformed user input: bad flags, bad file contents, misaligned grids.
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested a closed-form derivative from a family that has none.
struct derivative_unavailable : std::logic_error {
    using std::logic_error::logic_error;
};

/// A linear solve hit an (estimated) condition number beyond the guard.
/// Carries the evaluation time and the estimate so callers can report
/// where the family degenerated.
struct breakdown_error : std::runtime_error {
    breakdown_error(const std::string& what, double t_at, double cond_estimate)
        : std::runtime_error(what), t(t_at), cond(cond_estimate) {}

    double t;
    double cond;
};

} // namespace evolveq
