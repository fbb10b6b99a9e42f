#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar parameter is outside its admissible range (theta >= 0, alpha outside (0,1], ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a mathematical precondition (negative variance, atom below bound).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (empty sample sets, mismatched grids, bad probabilities).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The control system model is inconsistent or degenerate.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A floating-point intermediate became non-finite during an exponential-utility backup.
class NumericalInstability : public Error {
 public:
  NumericalInstability(double theta, int time, std::size_t node, std::size_t control);

  double theta() const noexcept { return theta_; }
  int time() const noexcept { return time_; }
  std::size_t node() const noexcept { return node_; }
  std::size_t control() const noexcept { return control_; }

 private:
  double theta_;
  int time_;
  std::size_t node_;
  std::size_t control_;
};

/// The estimated table footprint exceeds the configured memory budget.
class MemoryBudgetExceeded : public Error {
 public:
  MemoryBudgetExceeded(std::size_t required_bytes, std::size_t budget_bytes);

  std::size_t required_bytes() const noexcept { return required_; }
  std::size_t budget_bytes() const noexcept { return budget_; }

 private:
  std::size_t required_;
  std::size_t budget_;
};

}  // namespace riskctl
