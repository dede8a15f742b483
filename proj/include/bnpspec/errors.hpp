#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnpspec {

/// Malformed arguments (wrong lengths, empty inputs, bad configuration values).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its domain or returned a non-positive value
/// where positivity is required.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Factorization or other floating-point failure.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectral density fell below the configured floor. The sampler treats this
/// as a rejected proposal, never as a crash.
class ParameterSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the ARMA simulator when the AR or MA polynomial has a root on or
/// inside the unit circle.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The sampler could not find an admissible starting state.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite log-target encountered mid-chain.
class ChainNumericError : public NumericError {
 public:
  ChainNumericError(const std::string& what, std::size_t iteration)
      : NumericError(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class InsufficientSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnpspec
