#pragma once

#include <stdexcept>
#include <string>

namespace khom {

enum class Errc {
    InvalidInput,
    PrecisionExhausted,
    ShapeMismatch,
    NotCoprime,
    ThetaOutOfRange,
    RepresentationTooSmall,
    UnsupportedForm,
    NotAProjection,
    NonIntegerPairing,
    NotUnitary,
    UnstableIndex,
    InsufficientDigits,
    RankOverflow,
    LevelMismatch,
    HorizonTooSmall,
};

constexpr const char* errc_name(Errc e) noexcept {
    switch (e) {
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::PrecisionExhausted: return "PrecisionExhausted";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::NotCoprime: return "NotCoprime";
        case Errc::ThetaOutOfRange: return "ThetaOutOfRange";
        case Errc::RepresentationTooSmall: return "RepresentationTooSmall";
        case Errc::UnsupportedForm: return "UnsupportedForm";
        case Errc::NotAProjection: return "NotAProjection";
        case Errc::NonIntegerPairing: return "NonIntegerPairing";
        case Errc::NotUnitary: return "NotUnitary";
        case Errc::UnstableIndex: return "UnstableIndex";
        case Errc::InsufficientDigits: return "InsufficientDigits";
        case Errc::RankOverflow: return "RankOverflow";
        case Errc::LevelMismatch: return "LevelMismatch";
        case Errc::HorizonTooSmall: return "HorizonTooSmall";
    }
    return "Unknown";
}

/// Every library failure is reported through this type; `code()` says which
/// contract was violated.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace khom
