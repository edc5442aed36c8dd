#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ibt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's precondition.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric procedure (quadrature, root bracket, eigen-solve) failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An orbit came within the singular tolerance of the cut line x = A.
class NearCutError : public Error {
 public:
  NearCutError(std::string what, std::int64_t index)
      : Error(std::move(what)), index_(index) {}

  /// Iterate index at which the orbit hit the cut (0 for single steps).
  [[nodiscard]] std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// An excursion exceeded the return-time cap; the observation is censored.
class TailOverflow : public Error {
 public:
  TailOverflow(std::string what, std::int64_t cap)
      : Error(std::move(what)), cap_(cap) {}

  [[nodiscard]] std::int64_t cap() const noexcept { return cap_; }

 private:
  std::int64_t cap_;
};

}  // namespace ibt
