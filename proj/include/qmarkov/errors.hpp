#pragma once

#include <stdexcept>
#include <string>

namespace qmarkov {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError -> 1, NumericalError -> 2, ComparisonError -> 3.

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class ComparisonError : public std::runtime_error {
public:
    explicit ComparisonError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qmarkov
