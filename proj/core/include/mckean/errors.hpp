#ifndef MCKEAN_ERRORS_HPP
#define MCKEAN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mckean {

// Base of every error raised by the library. The CLI maps subclasses of
// NumericalError to exit status 2 and ConfigError to exit status 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A point lies outside the state space of the model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested operation is not defined for this model (e.g. Fourier data
// of a non translation-invariant interaction, or a line-domain spectrum).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A required upstream result (steady states, minimisers) is missing.
class DependencyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NumericalBlowupError : public NumericalError {
 public:
  NumericalBlowupError(const std::string& what, std::size_t particle);
  std::size_t particle() const noexcept { return particle_; }

 private:
  std::size_t particle_;
};

// Explicit transport would move mass further than one cell per step.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PositivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// beta >= beta_sharp where a coercive linearisation is required.
class CoercivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The witness density is itself a minimiser, so the entropy ratio is 0/0.
class WitnessIsMinimiserError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mckean

#endif  // MCKEAN_ERRORS_HPP
