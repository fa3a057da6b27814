#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "volterra/coefficients.hpp"
#include "volterra/grid.hpp"
#include "volterra/kernel.hpp"
#include "volterra/stats.hpp"

namespace volterra {

/// Monte Carlo estimates of E[sup_t |X_t|^p] (sup over grid nodes) per grid.
struct MomentTable {
  std::vector<int> powers;
  std::vector<std::size_t> grid_sizes;
  std::vector<std::vector<MeanEstimate>> estimates;  ///< [grid][power]
  bool diverged = false;  ///< some estimate is not finite
  bool stable = true;     ///< the two largest grids agree within 10% for every power

  const MeanEstimate& at(std::size_t grid, std::size_t power) const { return estimates.at(grid).at(power); }
};

MomentTable moment_scan(const CoefficientSpec& coeff, const std::vector<TimeGrid>& grids, std::size_t n_paths,
                        std::uint64_t seed, std::vector<int> powers = {2, 4, 8});

/// Raw points of a scaling fit: the abscissa and the moment estimate behind each ordinate.
struct ScalingResult {
  SlopeFit fit;
  std::vector<MeanEstimate> moments;
};

/// E |X (x)_t Theta^t - X (x)_{t'} Theta^{t'}|_T^4 for node index pairs (i, i');
/// fits log moment against log |t' - t|. Pairs with i == i' are reported with
/// a zero moment and left out of the fit. Requires the gaps to span a decade.
ScalingResult two_time_scaling(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t seed, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// E |X - X^n|_T^8 for the dyadic freezing levels; fits log2 moment against n.
/// Levels must be distinct, at least four, and divide the grid.
ScalingResult freeze_rate(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, const std::vector<int>& levels);

struct CovarianceEntry {
  double s = 0.0;
  double t = 0.0;
  MeanEstimate estimate;  ///< Monte Carlo covariance
  double oracle = 0.0;    ///< integral of K(s, r) K(t, r) over [0, min(s, t)]
};

struct CovarianceReport {
  std::vector<CovarianceEntry> entries;
  double max_abs_error = 0.0;
  double max_abs_t_stat = 0.0;
};

/// Covariance of x0 + int K dW on the nodes nearest to {T/5, 2T/5, ..., T}.
CovarianceReport covariance_check(const KernelSpec& kernel, const TimeGrid& grid, std::size_t n_paths,
                                  std::uint64_t seed);

}  // namespace volterra
