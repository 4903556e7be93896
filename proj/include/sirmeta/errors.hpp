#pragma once

#include <stdexcept>
#include <string>

namespace sirmeta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series, quadrature or iteration did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration. `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace sirmeta
