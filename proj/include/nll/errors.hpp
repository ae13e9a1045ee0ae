#pragma once

#include <stdexcept>
#include <string>

namespace nll {

/// Precondition failure on caller-supplied values (dimension mismatch, bad rate, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A modelling assumption does not hold (e.g. the noise matrix is not diagonally dominant).
class AssumptionViolated : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive search would exceed the enumeration guard.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nll
