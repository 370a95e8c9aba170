#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ghostsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration. Carries one entry per
/// violated field, each prefixed with the field path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// A physical precondition does not hold (non-normalizable width, slit
/// misses the state, unsatisfiable lens condition, ...).
class PhysicsError : public Error {
 public:
  using Error::Error;
};

/// The grid oracle cannot represent the requested configuration within its
/// extent, bandwidth or memory bounds.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A pattern could not be analysed (no fringes, too few fringes, bad axes).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghostsim
