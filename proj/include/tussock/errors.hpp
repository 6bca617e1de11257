#pragma once

#include <stdexcept>
#include <string>

namespace tussock {

enum class ErrorCode {
    InvalidArgument = 1,
    OutOfBounds,
    Parse,
    Io,
    MissingBand,
    Configuration,
    DimensionMismatch,
    EmptyInput,
    Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can map it to a status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace tussock
