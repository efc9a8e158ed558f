#pragma once

#include <stdexcept>
#include <string>

namespace sgm {

/// Raised when a state, drift or score evaluation produces NaN/Inf.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure reading or writing experiment artifacts.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sgm
