#include "volterra/errors.hpp"

#include <utility>

namespace volterra {

SimulationError::SimulationError(const std::string& what, std::size_t path, std::size_t step)
    : NumericalError(what + " (path " + std::to_string(path) + ", step " + std::to_string(step) + ")"),
      path_(path),
      step_(step) {}

NonConvergenceError::NonConvergenceError(const std::string& what, std::vector<double> deltas,
                                         std::vector<double> values)
    : NumericalError(what), deltas_(std::move(deltas)), values_(std::move(values)) {}

TransformError::TransformError(const std::string& what, double grid_value, double series_value)
    : NumericalError(what + " (grid " + std::to_string(grid_value) + ", series " +
                     std::to_string(series_value) + ")"),
      grid_value_(grid_value),
      series_value_(series_value) {}

SolverError::SolverError(const std::string& what, std::size_t step)
    : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

}  // namespace volterra
