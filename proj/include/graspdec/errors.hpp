#pragma once

#include <stdexcept>
#include <string>

namespace graspdec {

// Error taxonomy mirrors the CLI exit-code contract:
// InputError -> 2, IoError -> 3, NumericalError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

}  // namespace graspdec
