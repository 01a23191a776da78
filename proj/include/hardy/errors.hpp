#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hardy {

enum class ErrorCode {
    DivergentTail,
    UncertifiableTail,
    ZeroCumulativeWeight,
    ZeroDenominator,
    UnsupportedFamily,
    VerificationFailure,
    InvalidRegime,
    NotMember,
    BisectionExhausted,
    OutOfRange,
    EmptyGrid,
    HypothesisViolated,
    NotQuasiMonotone,
    NonMonotonePhi,
    ZeroPartialSum,
    ConvergentSum,
    BadRange,
    PreconditionFailed,
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DivergentTail: return "DivergentTail";
    case ErrorCode::UncertifiableTail: return "UncertifiableTail";
    case ErrorCode::ZeroCumulativeWeight: return "ZeroCumulativeWeight";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::VerificationFailure: return "VerificationFailure";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::BisectionExhausted: return "BisectionExhausted";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotQuasiMonotone: return "NotQuasiMonotone";
    case ErrorCode::NonMonotonePhi: return "NonMonotonePhi";
    case ErrorCode::ZeroPartialSum: return "ZeroPartialSum";
    case ErrorCode::ConvergentSum: return "ConvergentSum";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code and, where meaningful, the
/// sequence index at which the failure was detected.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::int64_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::optional<std::int64_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::int64_t> index_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) {
        throw Error(code, what);
    }
}

} // namespace hardy
