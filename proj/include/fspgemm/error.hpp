#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fspgemm {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse_error"; }

private:
    std::size_t line_;
};

class InvalidMatrix : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_matrix"; }
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension_mismatch"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

class FormatError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "format_error"; }
};

class SimulationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "simulation_error"; }
};

class IntegrityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "integrity_error"; }
};

}  // namespace fspgemm
