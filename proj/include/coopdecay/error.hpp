// error.hpp: exception hierarchy. Every library failure derives from Error and
// carries a short machine-readable kind() tag used by the CLI error record.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coopdecay {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

class SingularSeparationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "singular_separation"; }
};

class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate_configuration"; }
};

class DecompositionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "decomposition"; }
};

class PropagationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "propagation"; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    const char* kind() const noexcept override { return "parse"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

} // namespace coopdecay
