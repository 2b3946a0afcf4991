#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aefs {

/// Raised for malformed inputs: bad shapes, out-of-range arguments, non-finite values.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver produces a non-finite objective or gradient.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Raised by the CSV/JSON readers with a position in the offending file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aefs
