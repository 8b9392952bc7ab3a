#pragma once

#include <stdexcept>
#include <string>

namespace trilemma {

/// Bad user input: malformed files, out-of-range parameters, contract violations.
/// CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / environment failures. CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trilemma
