#pragma once

#include <stdexcept>
#include <string>

namespace zpsync {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent scenario parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A call-site argument outside its documented domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Two channel taps with (numerically) equal rate parameters; the closed-form
/// density has singular partial-fraction weights in that case.
class DegeneratePdpError : public Error {
public:
    using Error::Error;
};

/// A density or likelihood evaluation produced NaN, -inf or a non-positive
/// mixture value. Never swallowed.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace zpsync
