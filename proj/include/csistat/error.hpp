#pragma once

#include <stdexcept>
#include <string>

namespace csistat {

/**
 * @brief Error categories used across the toolkit.
 *
 * Each category maps onto a process exit code in the CLI:
 * validation/parse errors exit with 1, numeric/degenerate-input
 * errors with 2 and I/O failures with 3.
 */
enum class ErrorKind {
    Validation,
    Numeric,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid inputs, malformed files, broken invariants.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorKind::Validation, what) {}
};

/// Degenerate numeric situations (zero-energy frame, flat dynamic range, ...).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what)
        : Error(ErrorKind::Numeric, what) {}
};

/// Filesystem and stream failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& what)
        : Error(ErrorKind::Io, what) {}
};

}  // namespace csistat
