#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace volterra {

/// Input outside the mathematical domain of an operation (e.g. s >= t for a kernel).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration: grid divisibility, bad parameters, schema violations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that happen while numbers are being produced.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public NumericalError {
 public:
  SimulationError(const std::string& what, std::size_t path, std::size_t step);
  std::size_t path() const noexcept { return path_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t path_;
  std::size_t step_;
};

class EvaluationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DerivativeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A limit sequence that failed the Cauchy/rate test. Carries the raw values.
class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> deltas, std::vector<double> values);
  const std::vector<double>& deltas() const noexcept { return deltas_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> deltas_;
  std::vector<double> values_;
};

class TransformError : public NumericalError {
 public:
  TransformError(const std::string& what, double grid_value, double series_value);
  double grid_value() const noexcept { return grid_value_; }
  double series_value() const noexcept { return series_value_; }

 private:
  double grid_value_;
  double series_value_;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace volterra
