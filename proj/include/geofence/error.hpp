#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geofence {

enum class ErrorCode {
    InvalidCoordinate,
    InvalidGeometry,
    DegenerateInput,
    UnsupportedParameter,
    InvalidInput,
    NoPath,
    MissingDimension,
    ArmingRefused,
    InvalidState,
    Parse,
    Integrity,
    Version,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidCoordinate: return "invalid-coordinate";
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::UnsupportedParameter: return "unsupported-parameter";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NoPath: return "no-path";
    case ErrorCode::MissingDimension: return "missing-dimension";
    case ErrorCode::ArmingRefused: return "arming-refused";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::Version: return "version";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries an ErrorCode so callers can
/// dispatch on the class of failure without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace geofence
