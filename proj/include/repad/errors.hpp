#pragma once

#include <stdexcept>
#include <string>

namespace repad {

/// Thrown when a configuration value is structurally unusable
/// (zero hidden units, W below the minimum, unsupported horizon, ...).
struct InvalidConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numeric input (data value, window entry) is NaN or infinite.
struct NumericInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a threshold is requested from fewer retained error values
/// than the minimum the statistic needs.
struct InsufficientHistoryError : std::logic_error {
    using std::logic_error::logic_error;
};

/// CSV ingestion errors.
struct ColumnNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Row count or structural mismatch against the expected dataset shape.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Statistics requested over an empty outcome stream.
struct EmptyStreamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace repad
