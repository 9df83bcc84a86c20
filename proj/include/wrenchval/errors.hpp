#pragma once

#include <stdexcept>
#include <string>

namespace wrenchval {

// Error categories map onto the CLI exit codes: usage = 1, data = 2, numeric = 3.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when the energy detector finds no transient in a record.
struct NoTransientError : DataError {
    explicit NoTransientError(const std::string& record_id = "")
        : DataError(record_id.empty() ? std::string("no transient detected")
                                      : "no transient detected in record '" + record_id + "'"),
          record_id(record_id) {}
    std::string record_id;
};

}  // namespace wrenchval
