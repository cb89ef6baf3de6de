#pragma once

#include <stdexcept>
#include <string>

namespace wgt {

// Bad inputs: configuration, preconditions, malformed files. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: cutoff frequencies, singular pivots, diverging series.
// CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wgt
