#pragma once

#include <stdexcept>
#include <string>

namespace lensjet {

// Failure modes that callers are expected to branch on. Everything else
// (bad arguments, broken preconditions) throws std::invalid_argument.
enum class ErrorCode {
    grazing,
    trapped,
    tolerance_failure,
    no_turning_point,
    degenerate_turning,
    no_chord,
    shooting_failed,
    non_transversal,
    concave_window,
    fd_unstable,
    degenerate_directions,
    constraint_violation,
    bad_order,
    io_error,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::grazing: return "grazing";
        case ErrorCode::trapped: return "trapped";
        case ErrorCode::tolerance_failure: return "tolerance-failure";
        case ErrorCode::no_turning_point: return "no-turning-point";
        case ErrorCode::degenerate_turning: return "degenerate-turning";
        case ErrorCode::no_chord: return "no-chord";
        case ErrorCode::shooting_failed: return "shooting-failed";
        case ErrorCode::non_transversal: return "non-transversal";
        case ErrorCode::concave_window: return "concave-window";
        case ErrorCode::fd_unstable: return "fd-unstable";
        case ErrorCode::degenerate_directions: return "degenerate-directions";
        case ErrorCode::constraint_violation: return "constraint-violation";
        case ErrorCode::bad_order: return "bad-order";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lensjet
