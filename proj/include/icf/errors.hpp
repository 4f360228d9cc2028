#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icf {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A denominator vanished (or fell below tolerance) while evaluating or
/// fitting a continued fraction. Carries the index of the offending floor,
/// counted from 1 at the outermost floor.
class BreakdownError : public Error {
public:
    BreakdownError(const std::string& message, int floor_index)
        : Error(message), floor_(floor_index) {}

    int floor_index() const noexcept { return floor_; }

private:
    int floor_;
};

/// Malformed expression text. Position is a 0-based byte offset into the
/// source string.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message), pos_(position) {}

    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

/// Domain violation while evaluating an expression: log of a non-positive
/// value, division by zero, overflow.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid input: mismatched lengths, out-of-range grid
/// indices, violated type invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace icf
