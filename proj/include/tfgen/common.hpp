#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tfgen {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameter value (nonpositive lambda, zero-length window, ...).
struct ParamError : Error {
    using Error::Error;
};

/// Matrix/signal dimensions do not match the system they are used with.
struct ShapeError : Error {
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, non-PCM audio).
struct FormatError : Error {
    using Error::Error;
};

/// Frame operator is numerically singular for the requested lattice.
struct FrameError : Error {
    using Error::Error;
};

/// Requested configuration is outside the supported (painless) regime.
struct UnsupportedError : Error {
    using Error::Error;
};

/// Illegal phase-convention conversion (divisibility constraint violated).
struct ConventionError : Error {
    using Error::Error;
};

/// Value outside its documented range.
struct RangeError : Error {
    using Error::Error;
};

/// Filesystem-level failure (unreadable or unwritable path).
struct IoError : Error {
    using Error::Error;
};

}  // namespace tfgen
