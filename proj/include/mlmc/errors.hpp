#pragma once

#include <stdexcept>
#include <string>

namespace mlmc {

// Invalid configuration or input file; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-finite loss, solver divergence); CLI exit code 3.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed dataset/checkpoint files.
class FormatError : public std::runtime_error {
  public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mlmc
