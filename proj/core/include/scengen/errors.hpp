#pragma once

#include <stdexcept>
#include <string>

namespace scengen {

// Bad input: malformed config, file, or argument. CLI maps this to exit 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value reached during training. CLI maps this to exit 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scengen
