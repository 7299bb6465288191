#pragma once

#include <stdexcept>
#include <string>

namespace koop {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape mismatches, empty inputs, out-of-range windows.
struct DimensionError : Error {
    using Error::Error;
};

/// Invalid configuration values (negative bandwidth, too few oscillators, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// Non-finite or otherwise unusable numeric data.
struct DataError : Error {
    using Error::Error;
};

/// Numerical failure: factorization of a non-PSD matrix, eigensolver
/// non-convergence, blow-up during integration.
struct NumericError : Error {
    using Error::Error;
};

/// CSV parse failure. Carries the 1-based row/column of the offending cell
/// (0 when the location does not apply, e.g. an empty file).
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t row = 0, std::size_t col = 0)
        : Error(locate(msg, row, col)), row(row), col(col) {}

    std::size_t row;
    std::size_t col;

private:
    static std::string locate(const std::string& msg, std::size_t row, std::size_t col) {
        if (row == 0) return msg;
        std::string s = msg + " (row " + std::to_string(row);
        if (col > 0) s += ", column " + std::to_string(col);
        return s + ")";
    }
};

/// Filesystem-level failure (unreadable/unwritable path).
struct IoError : Error {
    using Error::Error;
};

} // namespace koop
