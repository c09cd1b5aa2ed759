// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpi {

enum class ErrorKind {
    SingularOnCircle,
    PhaseJump,
    NonCanonical,
    IllConditioned,
    Undecided,
    GaplessAtFixedPoint,
    NonCommuting,
    MissingChiral,
    GapViolation,
    UnstableCount,
    TrackingLost,
    QuadratureUnresolved,
    RangeTooLarge,
    SchemaError,
    SymmetryError,
    NotHermitian,
    DimensionMismatch,
    IndexOutOfRange,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::SingularOnCircle: return "SingularOnCircle";
    case ErrorKind::PhaseJump: return "PhaseJump";
    case ErrorKind::NonCanonical: return "NonCanonical";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::Undecided: return "Undecided";
    case ErrorKind::GaplessAtFixedPoint: return "GaplessAtFixedPoint";
    case ErrorKind::NonCommuting: return "NonCommuting";
    case ErrorKind::MissingChiral: return "MissingChiral";
    case ErrorKind::GapViolation: return "GapViolation";
    case ErrorKind::UnstableCount: return "UnstableCount";
    case ErrorKind::TrackingLost: return "TrackingLost";
    case ErrorKind::QuadratureUnresolved: return "QuadratureUnresolved";
    case ErrorKind::RangeTooLarge: return "RangeTooLarge";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::SymmetryError: return "SymmetryError";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // input problems map to exit code 3, undecided numerics to 2
    bool is_input_error() const noexcept {
        switch (kind_) {
        case ErrorKind::SchemaError:
        case ErrorKind::SymmetryError:
        case ErrorKind::NotHermitian:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::IndexOutOfRange:
        case ErrorKind::MissingChiral:
        case ErrorKind::RangeTooLarge:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace qpi
