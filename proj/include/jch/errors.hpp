#pragma once

#include <stdexcept>
#include <string>

namespace jch {

// Configuration / validation problems: bad keys, units, constraint violations.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical contract violations: non-hermitian inputs, norm loss, non-finite results.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jch
