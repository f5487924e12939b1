#pragma once

#include <stdexcept>
#include <string>

namespace schatten {

// Every failure raised by the library derives from Error; the kind is kept
// separately so front ends can map failures to exit codes without RTTI
// chains.
enum class ErrorKind {
    NotHermitian,
    NoConvergence,
    DomainError,
    OrderTooLow,
    ArityMismatch,
    DimensionMismatch,
    SingularOperand,
    NotVanishing,
    IllConditioned,
    ZeroCoordinate,
    InvalidArgument,
    ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Numeric failures (as opposed to malformed input).
    bool is_numeric() const noexcept {
        return kind_ != ErrorKind::InvalidArgument && kind_ != ErrorKind::ParseError;
    }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::OrderTooLow: return "OrderTooLow";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularOperand: return "SingularOperand";
    case ErrorKind::NotVanishing: return "NotVanishing";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ZeroCoordinate: return "ZeroCoordinate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace schatten
