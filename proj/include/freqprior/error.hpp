#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqprior {

enum class ErrorCode {
    InvalidArgument,
    ConstantChannel,
    ShapeMismatch,
    NotEnoughBins,
    NotInteriorBin,
    IllConditioned,
    IndexOutOfRange,
    MultiChannelUnsupported,
    EmptyTruths,
    ParseError,
    RaggedRows,
    NonNumericCell,
    TooShort,
    IoError,
};

/// Stable machine-readable tag, e.g. "NotEnoughBins".
std::string_view error_tag(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// that callers (and the CLI) can dispatch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view tag() const noexcept { return error_tag(code_); }

private:
    ErrorCode code_;
};

} // namespace freqprior
