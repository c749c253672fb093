#pragma once

#include <stdexcept>
#include <string>

namespace extflow {

/// Base class for every error raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain an operation is defined on
/// (r < 1, k = 0 where a nonzero mode is required, too few samples, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A semi-infinite integral whose integrand does not decay fast enough.
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

/// Flow parameters that violate the subcritical-decay condition.
class InadmissibleParameters : public Error {
 public:
  using Error::Error;
};

/// A per-mode solve failed; carries the Fourier index.
class ModeError : public Error {
 public:
  ModeError(int k, const std::string& what)
      : Error("mode k=" + std::to_string(k) + ": " + what), k_(k) {}
  int k() const noexcept { return k_; }

 private:
  int k_;
};

/// Malformed configuration or input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace extflow
