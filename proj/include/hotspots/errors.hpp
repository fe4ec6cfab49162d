#pragma once

#include <stdexcept>
#include <string>

namespace hotspots {

/// Invalid input: bad polygon, point outside a domain, out-of-range parameter.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration (JSON, CLI flags). Distinct from InputError so the
/// front-end can name the offending field.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& field, const std::string& message)
        : InputError(field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Iterative numerics gave up. Carries the last observed residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& message, double last_residual)
        : std::runtime_error(message), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// A resource cap (node count, memory) would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hotspots
