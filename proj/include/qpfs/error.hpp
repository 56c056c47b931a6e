#pragma once

#include <stdexcept>
#include <string>

namespace qpfs {

// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  config,     // bad flags, config file or schema
  data,       // unreadable or malformed dataset, unusable column contents
  numerical,  // solver / estimator failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

}  // namespace qpfs
