#pragma once
#include <stdexcept>
#include <string>

namespace freent {

// Rejected input: bad dimensions, malformed text or config, violated
// preconditions.  CLI maps this to its own exit code.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while computing: non-convergence, overflow, impossible state.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace freent
