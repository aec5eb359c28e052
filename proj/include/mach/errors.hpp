#pragma once

#include <stdexcept>
#include <string>

namespace mach {

/// Invalid argument supplied by the caller (bad rank, mode out of range, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Incompatible shapes between operands.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file; carries the 1-based line number of the offence.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Filesystem-level failure (missing file, unwritable path).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver exhausted its budget; names the offending singular index (1-based).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int singular_index)
        : std::runtime_error(what + " (singular index " + std::to_string(singular_index) + ")"),
          singular_index_(singular_index) {}
    int singular_index() const noexcept { return singular_index_; }

private:
    int singular_index_;
};

}  // namespace mach
