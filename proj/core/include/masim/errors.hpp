#pragma once

#include <stdexcept>
#include <string>

namespace masim {

// Every error thrown by the library derives from Error so callers can map
// failures to exit codes without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InfeasibleConstraints : public Error {
public:
    using Error::Error;
};

// A receiver or sample point sits exactly on an antenna element.
class SingularGeometry : public Error {
public:
    using Error::Error;
};

// Zero-forcing target lies inside the span of the null channels.
class DegenerateTarget : public Error {
public:
    using Error::Error;
};

class TooLargeInstance : public Error {
public:
    using Error::Error;
};

// Scenario configuration problem; field() names the offending JSON path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace masim
