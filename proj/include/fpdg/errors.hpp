#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fpdg {

/// Invalid user-supplied setup (mesh, parameters, config file).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation did not hold.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The linear solve in a time step did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double relative_residual, long iterations)
      : std::runtime_error(what), relative_residual(relative_residual), iterations(iterations) {}
  double relative_residual;
  long iterations;
};

/// No vector satisfies both the box and the conservation constraint.
class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Douglas-Rachford hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residual_tail)
      : std::runtime_error(what), residual_tail(std::move(residual_tail)) {}
  std::vector<double> residual_tail;
};

/// A convergence rate was requested from a nonpositive error.
class UndefinedRateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fpdg
