#pragma once

#include <stdexcept>
#include <string>

namespace cftp {

// Bad dimensions, non-stochastic rows, out-of-range parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotErgodicError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a sampler or iterative solver runs past its configured cap.
class StepCapExceeded : public std::runtime_error {
 public:
  StepCapExceeded(const std::string& what, std::size_t cap)
      : std::runtime_error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace cftp
