#pragma once

#include <stdexcept>
#include <string>

namespace evenscat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of the operation.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error("ParameterError: " + what) {}
};

/// A modulus polynomial is reducible or has the wrong degree.
class ModulusError : public Error {
 public:
  explicit ModulusError(const std::string& what) : Error("ModulusError: " + what) {}
};

/// The requested computation is too large to run exhaustively.
class FeasibilityError : public Error {
 public:
  explicit FeasibilityError(const std::string& what) : Error("FeasibilityError: " + what) {}
};

/// A rational expression hit a zero denominator.
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error("DegenerateInputError: " + what) {}
};

/// Malformed textual input (hex elements, polynomial strings).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError: " + what) {}
};

}  // namespace evenscat
