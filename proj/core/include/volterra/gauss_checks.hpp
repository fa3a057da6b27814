#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "volterra/gauss.hpp"
#include "volterra/grid.hpp"
#include "volterra/stats.hpp"

namespace volterra {

struct TowerOptions {
  std::size_t outer_paths = 1;
  std::size_t inner_paths = 100000;
  std::uint64_t seed = 1;
  /// Check times as fractions of the horizon; each is moved to the nearest node.
  std::vector<double> time_fractions{0.25, 0.5, 0.75};
};

struct TowerPoint {
  std::size_t outer_path = 0;
  std::size_t step = 0;
  double time = 0.0;
  double functional = 0.0;  ///< eval_u(t, X (x)_t Theta^t)
  MeanEstimate nested;      ///< Monte Carlo E[xi | F_t] from continuations
};

struct TowerReport {
  std::vector<TowerPoint> points;
  double max_abs_t_stat = 0.0;
};

/// Compares eval_u on concatenated paths with nested Monte Carlo estimates of
/// E[g(X_T) + int_0^T f(s, X_s) ds | F_t] (time integral by the trapezoid rule
/// on the grid). X is the Gaussian Volterra process of the problem's kernel.
TowerReport tower_check(const GaussFunctional& fnl, const TimeGrid& grid, const TowerOptions& opts);

struct DriftReport {
  std::size_t from_step = 0;
  std::size_t to_step = 0;
  MeanEstimate functional;  ///< u(t_b, X (x) Theta^{t_b}) - u(t_a, X (x) Theta^{t_a})
  MeanEstimate markovian;   ///< u~(t_b, X_{t_b}) - u~(t_a, X_{t_a})
};

/// Empirical drift of the path functional and of the Markovian comparator
/// between two grid dates. Needs f = 0 and from_step < to_step <= N.
DriftReport martingale_drift(const GaussFunctional& fnl, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed, std::size_t from_step, std::size_t to_step);

}  // namespace volterra
