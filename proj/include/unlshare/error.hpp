#ifndef UNLSHARE_ERROR_HPP
#define UNLSHARE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace unlshare {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A value is outside the domain an operation accepts (bandwidth, exponent,
/// partial-subframe length, malformed profile, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A Wi-Fi burst would carry zero MPDUs under the active duration cap.
class EmptyBurst : public Error {
public:
  using Error::Error;
};

/// The backoff chain cannot leave its defer state (blocking probability 1).
class DegenerateBlocking : public Error {
public:
  using Error::Error;
};

/// The requested DFM split cannot be built from standard channel widths.
class InfeasiblePartition : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations)
  {
  }

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

private:
  double residual_;
  int iterations_;
};

/// Configuration text could not be parsed or failed validation.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace unlshare

#endif /* UNLSHARE_ERROR_HPP */
