#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace randhall {

/// Argument outside the mathematical domain of an operation (t < 0, p < 1, divergent exponents, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Incompatible containers: grid mismatch, node mismatch, malformed binary dumps.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition on field contents does not hold (e.g. divergence-free input).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent relations with no admissible solution. `relation` names the violated identity.
class InfeasibleParameters : public std::runtime_error {
 public:
  InfeasibleParameters(std::string relation, const std::string& detail)
      : std::runtime_error(detail), relation_(std::move(relation)) {}
  const std::string& relation() const noexcept { return relation_; }

 private:
  std::string relation_;
};

/// Fixed-point iteration did not reach tolerance; carries the residual history.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Time integration exceeded the overflow guard.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace randhall
