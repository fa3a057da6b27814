#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/kernel.hpp"

namespace volterra {

/// Scalar path on [0, T]. Piecewise linear between knots. A repeated knot
/// time marks a jump: the first value is the left limit, the last value is
/// the (right-continuous) value at that time.
class Path {
 public:
  Path() = default;
  Path(std::vector<double> times, std::vector<double> values);
  static Path on_grid(const TimeGrid& grid, std::vector<double> values);
  static Path constant(double horizon, double value);

  double operator()(double s) const;
  double left_limit(double s) const;
  double horizon() const noexcept { return times_.back(); }
  double terminal() const noexcept { return values_.back(); }
  double sup_norm() const noexcept;
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Knots covering [a, b] for trapezoid integration: starts at (a, value at a),
  /// keeps every interior knot (jumps give zero-width cells) and ends at
  /// (b, left limit at b).
  std::vector<std::pair<double, double>> segment(double a, double b) const;

  /// Path with the extra knot times inserted (no change to the function).
  Path refined(std::span<const double> extra) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// A perturbation direction eta on (anchor, T]. Near the anchor it may blow up
/// like (s - anchor)^exponent with exponent > -1; breakpoints list the points
/// where eta is not smooth.
struct Direction {
  std::function<double(double)> fn;
  double anchor = 0.0;
  double exponent = 0.0;
  std::vector<double> breakpoints;

  double operator()(double s) const { return fn(s); }
  bool singular() const noexcept { return exponent < 0.0; }

  static Direction constant(double value);
  static Direction from_path(Path path);
  /// s -> (s - anchor)^exponent, the direction a^t of the rough Heston PPDE.
  static Direction power(double anchor, double exponent);
};

/// s -> scale * K(s, anchor) on (anchor, T]; truncated kernels give a bounded
/// direction with a breakpoint at anchor + delta.
Direction kernel_direction(const KernelSpec& spec, double anchor, double scale = 1.0);

Direction combine(double a, const Direction& x, double b, const Direction& y);

/// omega + eps * eta * 1_[t, T]: values before t are untouched and a jump is
/// created at t. eta is sampled at the knots of omega and at its breakpoints.
Path bump(const Path& omega, double t, double eps, const Direction& eta);

/// Trapezoid integral of fn(s, omega(s)) over the knots of omega in [a, b].
double trapezoid(const Path& omega, double a, double b, const std::function<double(double, double)>& fn);

}  // namespace volterra
