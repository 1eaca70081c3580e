#pragma once

#include <stdexcept>
#include <string>

namespace rolesim {

// File and serialization failures (missing files, malformed content).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (singular systems, diverging iterations).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rolesim
