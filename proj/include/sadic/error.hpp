#pragma once

#include <stdexcept>
#include <string>

namespace sadic {

/// Base class for every failure raised by the library. The CLI maps these
/// to exit status 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource cap (cell count, grid size) would be exceeded.
/// The CLI maps this to exit status 2.
class ResourceCapError : public Error {
public:
    explicit ResourceCapError(const std::string& what) : Error(what) {}
};

/// Numerical breakdown (degenerate cocycle, singular matrix, undefined
/// Mahler measure).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace sadic
