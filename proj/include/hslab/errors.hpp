#pragma once

#include <stdexcept>
#include <string>

namespace hslab {

// Base for everything the library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the domain an operation is defined on (a = 1, a < 1/4 for mu, ...).
struct DomainError : Error {
    using Error::Error;
};

// Numerical validity failures: instability, phase below floor, quadrature failure.
struct NumericalError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace hslab
