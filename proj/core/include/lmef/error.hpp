#pragma once

#include <stdexcept>
#include <string>

namespace lmef {

/// Thrown when a caller violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Runtime failure inside an algorithm (e.g. divergent GAN training).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw PreconditionError(message);
    }
}

} // namespace lmef
