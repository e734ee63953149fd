#ifndef GLANDTOPO_ERROR_HPP
#define GLANDTOPO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace glandtopo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two rasters that must agree in size do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied parameter is outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its content is not a valid PNG / F32R raster.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace glandtopo

#endif  // GLANDTOPO_ERROR_HPP
