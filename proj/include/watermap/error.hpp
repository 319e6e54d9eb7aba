#pragma once

#include <stdexcept>
#include <string>

namespace watermap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raster dimensions or alignment disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A file, header or CSV row could not be interpreted.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but the computation is undefined on it
/// (identical histogram samples, coincident endmembers, empty ROI, S = 0 ...).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Bad configuration key or value.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace watermap
