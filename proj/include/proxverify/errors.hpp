#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace proxverify {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (non-finite entry, bad step, non-PSD operator...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The function does not advertise the capability an operation needs.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its cap. Carries the last iterate and its residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

/// Function-spec parse failure; `position()` is the 0-based column of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string input, std::size_t position)
      : Error(what), input_(std::move(input)), position_(position) {}

  const std::string& input() const noexcept { return input_; }
  std::size_t position() const noexcept { return position_; }

  /// Two-line message with a caret under the offending column.
  std::string annotated() const {
    return input_ + "\n" + std::string(position_, ' ') + "^ " + what();
  }

 private:
  std::string input_;
  std::size_t position_;
};

}  // namespace proxverify
