#pragma once

#include <stdexcept>
#include <string>

namespace thermoform {

// Bad input: malformed tables, out-of-range symbols, violated preconditions.
// The CLI maps this to exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: iteration did not converge, contract residual too large.
// The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw validation_error(msg);
}

inline void require_numeric(bool ok, const std::string& msg) {
    if (!ok) throw numeric_error(msg);
}

} // namespace thermoform
