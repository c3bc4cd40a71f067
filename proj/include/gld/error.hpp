#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gld {

enum class ErrorCode {
    OutsideDomain,
    TurningPoint,
    BelowMinimum,
    OutsideEnergyRange,
    TruncationRequired,
    TruncationInsideDomain,
    InvalidInterval,
    InvalidArgument,
    NoConvergence,
    StraddlesCritical,
    EmptyLadder,
    DegenerateFit,
    TooFewSamples,
    Io,
    Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::TurningPoint: return "TurningPoint";
    case ErrorCode::BelowMinimum: return "BelowMinimum";
    case ErrorCode::OutsideEnergyRange: return "OutsideEnergyRange";
    case ErrorCode::TruncationRequired: return "TruncationRequired";
    case ErrorCode::TruncationInsideDomain: return "TruncationInsideDomain";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StraddlesCritical: return "StraddlesCritical";
    case ErrorCode::EmptyLadder: return "EmptyLadder";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

} // namespace gld
