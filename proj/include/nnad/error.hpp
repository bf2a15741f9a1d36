#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `row()` is 1-based and counts data rows (0 = not row specific).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A numerical routine did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace nnad
