#pragma once

#include <stdexcept>
#include <string>

namespace restopath {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed document: bad JSON, missing or mistyped field.
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The scenario cannot be solved at all (no energized bus, unreachable target).
class UnsolvableError : public Error {
public:
    using Error::Error;
};

} // namespace restopath
