#pragma once

#include <stdexcept>
#include <string>

namespace strokeforge {

// Precondition violated on a value (bad t, empty mask, mismatched sizes...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (thresholds out of order, negative lambda...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// NaN/Inf encountered in a gradient or loss.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Perceptual service unreachable or returned a malformed response.
class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& what, int status = 0)
        : std::runtime_error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

// Allocation over regions that contain no edge points at all.
class NoDrawableContent : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace strokeforge
