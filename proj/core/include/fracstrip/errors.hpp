#pragma once

#include <stdexcept>
#include <string>

namespace fracstrip {

/// Raised when user-supplied parameters or configuration violate a contract.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical procedure fails to converge or produces an
/// inadmissible result (non-PSD embedding, quadrature exhaustion, blow-up).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracstrip
