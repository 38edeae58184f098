#pragma once

#include <stdexcept>
#include <string>

namespace riskcast {

// Error taxonomy mirrored by the CLI exit codes: validation -> 2,
// numerical -> 3, io -> 4.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace riskcast
