#pragma once

#include <stdexcept>
#include <string>

namespace vibrokit {

/// Raised when an algorithm reaches a numerically impossible state
/// (singular innovation covariance, non-finite intermediate, ...).
/// Kept separate from std::invalid_argument so callers can map it to a
/// dedicated exit / error code.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File / parse failures at the I/O boundary.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vibrokit
