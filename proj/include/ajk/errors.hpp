#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ajk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A (series, period) pair outside the panel.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Vectors or matrices with incompatible shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument outside the domain of the operation (d > nT, q > T, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// More distinct items requested than exist.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Non-finite or singular intermediate quantity. Carries the period or
/// iteration at which it was detected, when known.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what,
                            std::optional<int> period = std::nullopt,
                            std::optional<int> iteration = std::nullopt)
        : Error(what), period_(period), iteration_(iteration) {}

    std::optional<int> period() const { return period_; }
    std::optional<int> iteration() const { return iteration_; }

private:
    std::optional<int> period_;
    std::optional<int> iteration_;
};

/// Malformed input file. Row and column are 1-based positions in the file.
class IngestionError : public Error {
public:
    IngestionError(const std::string& what, int row = 0, int column = 0)
        : Error(row > 0 ? what + " (row " + std::to_string(row) +
                              (column > 0 ? ", column " + std::to_string(column) : std::string{}) + ")"
                        : what),
          row_(row), column_(column) {}

    int row() const { return row_; }
    int column() const { return column_; }

private:
    int row_;
    int column_;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ajk
