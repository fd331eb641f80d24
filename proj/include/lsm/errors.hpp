#pragma once

#include <stdexcept>
#include <string>

namespace lsm {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A real value does not fit the requested fixed-point format under the
// Error overflow policy.
class RangeError : public Error {
public:
    using Error::Error;
};

// Invalid configuration (bad format string, bad topology, bad rates, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Dimension mismatch between data and the structure consuming it.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input file (WAV header, CSV schema, model file).
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// LFSR constructed with the forbidden all-zero state.
class ZeroStateError : public Error {
public:
    using Error::Error;
};

// Signal is entirely below the silence threshold.
class EmptySignalError : public Error {
public:
    using Error::Error;
};

// Levinson-Durbin hit a nonpositive prediction-error variance.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A class statistic (e.g. intra-class distance) degenerated to zero, or the
// training data contains a single class.
class DegenerateError : public Error {
public:
    using Error::Error;
};

} // namespace lsm
