#pragma once

#include <stdexcept>
#include <string>

namespace bundlealg {

// Bad caller input: wrong shapes, values outside domains, malformed files.
// CLI maps this to exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical postcondition failed (residual above threshold, no convergence).
// Distinct from validation_error so callers can tell bad data from bad math.
// CLI maps this to exit code 2.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bundlealg
