#pragma once

#include <stdexcept>
#include <string>

namespace crashsched {

// Base for everything thrown by this library on purpose.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad pattern file, invalid schedule, unparseable rational.
struct validation_error : error {
    explicit validation_error(const std::string& msg) : error(msg) {}
};

// A documented operation precondition does not hold (wrong speedup range,
// beta too small, undefined gamma, ...).
struct precondition_error : error {
    explicit precondition_error(const std::string& msg) : error(msg) {}
};

// A configured resource budget was exceeded (event count, oracle size).
struct budget_error : error {
    explicit budget_error(const std::string& msg) : error(msg) {}
};

// Arithmetic left the exactly representable range.
struct overflow_error : error {
    explicit overflow_error(const std::string& msg) : error(msg) {}
};

// A "cannot happen" consistency check failed.
struct internal_error : error {
    explicit internal_error(const std::string& msg) : error(msg) {}
};

} // namespace crashsched
