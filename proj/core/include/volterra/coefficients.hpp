#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/kernel.hpp"

namespace volterra {

/// Read-only view of one path's states on the nodes t_0..t_step. Reading a
/// later node throws, which enforces adaptedness of coefficient functions.
class PathView {
 public:
  PathView(std::span<const double> states, std::size_t dim, std::size_t step, const TimeGrid& grid) noexcept
      : states_(states), dim_(dim), step_(step), grid_(&grid) {}

  std::size_t step() const noexcept { return step_; }
  std::size_t dim() const noexcept { return dim_; }
  double time() const noexcept { return grid_->time(step_); }
  const TimeGrid& grid() const noexcept { return *grid_; }
  std::span<const double> state(std::size_t j) const;
  std::span<const double> current() const noexcept { return states_.subspan(step_ * dim_, dim_); }
  /// The underlying storage, including nodes after step().
  std::span<const double> states_span() const noexcept { return states_; }

 private:
  std::span<const double> states_;
  std::size_t dim_;
  std::size_t step_;
  const TimeGrid* grid_;
};

/// Local part of a coefficient: (s, path on [0, s]) -> values written to out.
using LocalFunction = std::function<void(double s, const PathView& past, std::span<double> out)>;

/// Coefficients of the Volterra SDE
///   X_t = x + int_0^t b(t; s, X) ds + int_0^t sigma(t; s, X) dW_s
/// in the separable form b(t; s, w) = K_b(t, s) * beta(s, w_[0,s]) and
/// sigma(t; s, w) = K_sigma(t, s) * gamma(s, w_[0,s]). beta writes d values;
/// gamma writes a d x k row-major matrix whose columns pair with the noise.
struct CoefficientSpec {
  std::size_t dim_state = 1;
  std::size_t dim_noise = 1;
  std::vector<double> initial{0.0};
  KernelSpec drift_kernel;
  KernelSpec diffusion_kernel;
  LocalFunction drift;      ///< empty means b = 0
  LocalFunction diffusion;  ///< empty means sigma = K_sigma * identity (d == k)

  bool has_drift() const noexcept { return static_cast<bool>(drift); }
  double hurst() const noexcept { return diffusion_kernel.hurst(); }

  void local_drift(double s, const PathView& past, std::span<double> out) const;
  void local_diffusion(double s, const PathView& past, std::span<double> out) const;

  /// Full coefficients b(t; s, w) and sigma(t; s, w).
  std::vector<double> drift_at(double t, double s, const PathView& past) const;
  std::vector<double> diffusion_at(double t, double s, const PathView& past) const;

  /// Copy with both kernels truncated at delta.
  CoefficientSpec truncated(double delta) const;

  /// Driftless Gaussian Volterra process x + int K(t, s) dW_s.
  static CoefficientSpec gaussian(const KernelSpec& kernel, double x0 = 0.0);
  static CoefficientSpec brownian(double x0 = 0.0);

  void validate() const;
};

/// Growth probe: the largest ratio |phi(t; s, w)| / ((1 + |w|^kappa) (t - s)^(H - 1/2))
/// over the supplied sample times, for phi = b and sigma. Callers compare it
/// with their asserted constant C.
double growth_ratio(const CoefficientSpec& coeff, const PathView& past, std::span<const double> eval_times,
                    double kappa);

}  // namespace volterra
