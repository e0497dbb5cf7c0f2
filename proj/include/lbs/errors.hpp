#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbs {

/// Base class for every error raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-domain scalar argument (calibration threshold, grain, radius, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Instance data violating its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A schedule that is not in the feasible set, or a funnel that contains none.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class MemoryBudgetError : public Error {
 public:
  MemoryBudgetError(std::size_t required, std::size_t available)
      : Error("memory budget exceeded: required " + std::to_string(required) +
              " bytes, available " + std::to_string(available) + " bytes"),
        required_(required),
        available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lbs
