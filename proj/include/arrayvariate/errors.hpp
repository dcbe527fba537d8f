#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arrayvariate {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-conformable shapes, length mismatches, non-square where square is required.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A one-based index component outside its mode's range.
class IndexError : public Error {
 public:
  IndexError(std::size_t mode, std::size_t index, std::size_t extent)
      : Error("index " + std::to_string(index) + " out of range 1.." +
              std::to_string(extent) + " in mode " + std::to_string(mode)),
        mode_(mode) {}
  explicit IndexError(const std::string& what) : Error(what) {}

  /// One-based mode that failed, 0 if not mode specific.
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_ = 0;
};

/// Singular or rank-deficient matrix. `mode()` is one-based, 0 when unknown.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what, std::size_t mode = 0)
      : Error(what), mode_(mode) {}
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

/// Argument outside the function's domain (negative radius, negative t).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid distribution parameter (degrees of freedom ≤ 0 and similar).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A size guard was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Operation not supported for the given kernel.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to converge or produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed ARRV1/MATV1 text.
class FormatError : public Error {
 public:
  FormatError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace arrayvariate
