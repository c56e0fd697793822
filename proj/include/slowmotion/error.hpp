#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slowmotion {

enum class ErrorKind {
    GridMismatch,
    DomainViolation,
    InvalidFlux,
    NoBracket,
    NonConvergence,
    OrderViolation,
    C1MatchFailure,
    NoRoot,
    UnresolvedLayer,
    SignConditionViolated,
    CFLViolation,
    NaNDetected,
    ProjectionBracketFailure,
    MissingSnapshots,
    Config,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::InvalidFlux: return "InvalidFlux";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::C1MatchFailure: return "C1MatchFailure";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::UnresolvedLayer: return "UnresolvedLayer";
    case ErrorKind::SignConditionViolated: return "SignConditionViolated";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::NaNDetected: return "NaNDetected";
    case ErrorKind::ProjectionBracketFailure: return "ProjectionBracketFailure";
    case ErrorKind::MissingSnapshots: return "MissingSnapshots";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers can branch
/// without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace slowmotion
