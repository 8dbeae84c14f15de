#pragma once

#include <stdexcept>
#include <string>

namespace coneym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different charts.
class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// Form degree outside the range an operation accepts.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// Operands carry different coefficient algebras, or a basis is not closed.
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or violated precondition not covered above.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace coneym
