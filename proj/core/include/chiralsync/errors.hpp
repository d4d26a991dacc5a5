#pragma once

#include <stdexcept>
#include <string>

namespace chiralsync {

// Bad input: malformed network, scenario or file. Maps to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver failure, degenerate window, unphysical state. Maps to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chiralsync
