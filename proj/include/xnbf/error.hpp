#pragma once

#include <stdexcept>
#include <string>

namespace xnbf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or argument violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The threshold bracket (noise variance, region contrast) is empty or inverted.
class BracketError : public Error {
public:
    using Error::Error;
};

} // namespace xnbf
