#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meshpress {

enum class ErrorCode {
    BadImage,
    ImageTooLarge,
    ImageTooSmall,
    BadConfig,
    WrongMode,
    StencilTooWide,
    TextTooLong,
    DimensionMismatch,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every core operation. `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace meshpress
