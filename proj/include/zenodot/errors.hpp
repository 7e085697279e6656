// errors.hpp — typed error hierarchy used across the library
//
// ConfigError: invalid user input (bad spec fields, schema violations).
// NumericError: singular parameters or undefined quantities (never NaN).
// IoError: file read/write failures.
// The CLI maps these to exit codes 1, 2 and 3 respectively.

#pragma once

#include <stdexcept>
#include <string>

namespace zenodot {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace zenodot
