#pragma once

#include <stdexcept>
#include <string>

namespace mmdscan {

enum class ErrorCode {
    invalid_argument = 1,
    insufficient_samples = 2,
    bounds = 3,
    capacity = 4,
    io = 5,
    parse = 6,
    internal = 7,
};

const char* error_code_name(ErrorCode code);

// Library error carrying a stable code for the C boundary.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace mmdscan
