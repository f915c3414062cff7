#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wqmc {

// Precondition violations raise std::invalid_argument. The three types below
// cover the remaining failure categories; the CLI maps each to an exit code.

/// An enumeration or table would exceed its configured size limit.
class WorkGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A numeric validation failed (non-invertible CDF, failed round trip, ...).
class NumericValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wqmc
