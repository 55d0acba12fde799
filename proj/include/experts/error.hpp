#pragma once

#include <stdexcept>
#include <string>

namespace experts {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or unsupported configuration (mismatched expert counts,
/// inapplicable bound, unknown noise family, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: non-finite losses, exhausted replay, negative edge times.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

/// Enumeration guard exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to reach the requested accuracy.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved_accuracy() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace experts
