#pragma once

#include <stdexcept>
#include <string>

namespace perfpred {

// Error taxonomy used across the library. All derive from std::runtime_error
// so callers can catch broadly or per category.

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IngestionError : std::runtime_error {
    explicit IngestionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MapError : std::runtime_error {
    explicit MapError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace perfpred
