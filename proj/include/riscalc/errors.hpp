#pragma once

#include <stdexcept>
#include <string>

namespace riscalc {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Meijer-G parameter set the evaluator cannot handle (pole collision,
/// no separating contour, divergent residue series).
class UnsupportedParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical method ran out of refinement budget before reaching its
/// tolerance. Carries the error estimate it did achieve.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Root bracketing failed.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid sweep configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riscalc
