#pragma once

#include <stdexcept>
#include <string>

namespace valsketch {

/// Raised when an argument violates an operation's precondition or domain.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an exact computation would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace valsketch
