#pragma once

#include <stdexcept>
#include <string>

namespace vigil {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad EDF bytes, unknown channel labels, invalid
// configuration, out-of-contract arguments.
struct InputError : Error {
    using Error::Error;
};

// Filesystem-level failures (open/read/write).
struct IoError : Error {
    using Error::Error;
};

// A feature denominator is degenerate for one epoch. Callers flag the
// epoch and keep going; this never aborts a batch run.
struct FeatureUndefinedError : Error {
    using Error::Error;
};

}  // namespace vigil
