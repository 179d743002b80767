#pragma once

#include <stdexcept>
#include <string>

namespace mwkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
public:
  using Error::Error;
};

/// The field is undefined at the focus F; raised for inputs closer than the
/// singular threshold.
class SingularAtFocus : public Error {
public:
  SingularAtFocus() : Error("state coincides with the focus F") {}
};

class NoInteriorEquilibrium : public Error {
public:
  explicit NoInteriorEquilibrium(double omega)
      : Error("no interior equilibrium for omega = " + std::to_string(omega)) {}
};

/// The requested parameter sits on a bifurcation value where the strict
/// classification is ill-posed.
class DegenerateTransition : public Error {
public:
  using Error::Error;
};

class NoSaddle : public Error {
public:
  explicit NoSaddle(double omega)
      : Error("S+ is not a hyperbolic saddle for omega = " + std::to_string(omega)) {}
};

class StartAtFocus : public Error {
public:
  StartAtFocus() : Error("integration cannot start at the focus F") {}
};

class NonFiniteState : public Error {
public:
  NonFiniteState() : Error("integration step produced a non-finite state") {}
};

class OutOfSpan : public Error {
public:
  OutOfSpan() : Error("rescaled time outside the trajectory span") {}
};

}  // namespace mwkit
