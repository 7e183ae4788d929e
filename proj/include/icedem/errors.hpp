#ifndef ICEDEM_ERRORS_HPP
#define ICEDEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace icedem {

/// Bad scene/scenario/material input. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite state or diverging solution detected mid-run. Exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace icedem

#endif  // ICEDEM_ERRORS_HPP
