#pragma once

#include <stdexcept>
#include <string>

namespace rangeseg {

/// Invalid configuration or parameters (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable, truncated or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rangeseg
