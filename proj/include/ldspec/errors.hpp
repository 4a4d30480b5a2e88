#pragma once

#include <stdexcept>
#include <string>

namespace ldspec {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation (bad input files,
/// out-of-range parameters, schema violations). CLI maps this to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// Numerical failure at runtime (singular ion configuration, melted cluster,
/// non-converged fit). CLI maps this to exit code 3.
struct NumericsError : Error {
    using Error::Error;
};

} // namespace ldspec
