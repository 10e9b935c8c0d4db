#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlflip {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data problems: missing files, malformed input, invalid configuration.
struct DataError : Error {
  using Error::Error;
};

struct LoadError : DataError {
  using DataError::DataError;
};

struct FormatError : DataError {
  FormatError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct ConfigError : DataError {
  using DataError::DataError;
};

struct ShapeError : Error {
  using Error::Error;
};

struct AddressError : Error {
  using Error::Error;
};

struct PlannerError : Error {
  using Error::Error;
};

}  // namespace wlflip
