#pragma once

#include <stdexcept>
#include <string>

namespace photopuf {

/// Precondition violated by the caller (bad dimension, length, range).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable signal (e.g. a constant image).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to converge or produced non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested feature exists in the interface but is not implemented.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while decoding one of the binary file formats.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { bad_magic, bad_version, truncated, malformed };

  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace photopuf
