#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dea {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data. Row and column are 1-based positions in
/// the source file (0 when not applicable).
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        if (row == 0 && column == 0) {
            return what;
        }
        std::string out = what + " (";
        if (row != 0) {
            out += "row " + std::to_string(row);
        }
        if (column != 0) {
            out += (row != 0 ? ", column " : "column ") + std::to_string(column);
        }
        return out + ")";
    }

    std::size_t row_;
    std::size_t column_;
};

/// The simplex could not meet its tolerances even after the anti-cycling fallback.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Branch-and-bound exceeded its node budget.
class NodeLimitError : public Error {
public:
    using Error::Error;
};

/// A model that must be feasible came back infeasible, or a solve otherwise failed.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Caller asked for something incompatible (model vs returns-to-scale, unknown id, bad grid).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace dea
