#pragma once

#include <stdexcept>
#include <string>

namespace dfhc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input data (bad CSV cell, NaN sample, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Fold geometry cannot be satisfied or does not match the raster.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration, manifest, or spec file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// File-system or codec failure; message carries the path.
class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace dfhc
