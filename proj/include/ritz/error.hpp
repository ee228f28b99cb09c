#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ritz {

enum class ErrorCode {
    NonFinite,
    NoConvergence,
    DimensionMismatch,
    ZeroMatrix,
    DivisionByZero,
    NegativeInput,
    NegativeSingularValue,
    PreconditionViolated,
    NotOrthonormal,
    FullSpace,
    DegenerateCut,
    SingularT,
    NotPositiveDefinite,
    AnglesTooLarge,
    NotInvariant,
    NotTopK,
    NoSeparation,
    InvalidCertificate,
    HypothesisFailed,
    SpecInvalid,
    GridInvalid,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroMatrix: return "ZeroMatrix";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::NegativeInput: return "NegativeInput";
        case ErrorCode::NegativeSingularValue: return "NegativeSingularValue";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NotOrthonormal: return "NotOrthonormal";
        case ErrorCode::FullSpace: return "FullSpace";
        case ErrorCode::DegenerateCut: return "DegenerateCut";
        case ErrorCode::SingularT: return "SingularT";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::AnglesTooLarge: return "AnglesTooLarge";
        case ErrorCode::NotInvariant: return "NotInvariant";
        case ErrorCode::NotTopK: return "NotTopK";
        case ErrorCode::NoSeparation: return "NoSeparation";
        case ErrorCode::InvalidCertificate: return "InvalidCertificate";
        case ErrorCode::HypothesisFailed: return "HypothesisFailed";
        case ErrorCode::SpecInvalid: return "SpecInvalid";
        case ErrorCode::GridInvalid: return "GridInvalid";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` carries the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }

    /// Offending entry for index-carrying errors (DivisionByZero).
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::optional<std::size_t> index = std::nullopt) {
    throw Error(code, message, index);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace ritz
