#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cantor {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Raised when an evaluation can no longer be enclosed tightly enough at the
// requested precision. `last_safe_level` is the deepest level that still works.
class DepthLimitError : public Error {
 public:
  DepthLimitError(const std::string& what, std::size_t last_safe_level)
      : Error(what), last_safe_level_(last_safe_level) {}
  std::size_t last_safe_level() const noexcept { return last_safe_level_; }

 private:
  std::size_t last_safe_level_;
};

class DominationViolated : public Error {
 public:
  using Error::Error;
};

class OutOfDepth : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cantor
