#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcs {

enum class ErrorKind {
    NullspaceDegenerate,
    NullspaceEmpty,
    NotPositive,
    CapExceeded,
    BadSubset,
    BadShape,
    UnsupportedDimension,
    NonConvergence,
    OutOfRange,
    InvalidArgument,
    LineSearchFailed,
    AllStartsFailed,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NullspaceDegenerate: return "NullspaceDegenerate";
        case ErrorKind::NullspaceEmpty: return "NullspaceEmpty";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::BadSubset: return "BadSubset";
        case ErrorKind::BadShape: return "BadShape";
        case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::LineSearchFailed: return "LineSearchFailed";
        case ErrorKind::AllStartsFailed: return "AllStartsFailed";
    }
    return "Unknown";
}

/// Failures of the invariant-state solve. A parameter point that produces one
/// of these has no usable chain state.
constexpr bool is_solve_failure(ErrorKind kind) noexcept {
    return kind == ErrorKind::NullspaceDegenerate || kind == ErrorKind::NullspaceEmpty ||
           kind == ErrorKind::NotPositive;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string_view name() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

} // namespace fcs
