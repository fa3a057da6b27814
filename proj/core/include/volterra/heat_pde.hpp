#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace volterra {

struct HeatGridConfig {
  double x_min = -8.0;
  double x_max = 8.0;
  std::size_t n_space = 801;
  std::size_t n_tau = 400;
  /// Implicit Euler substeps at the start (damps the Crank-Nicolson
  /// oscillations of non-smooth initial data).
  std::size_t smoothing_steps = 4;

  void validate() const;
};

/// v(tau, x) solving dv/dtau = v_xx / 2 with v(0, .) = g, tabulated on a
/// uniform (tau, x) grid. In variance time tau = sigma-bar^2 this is
/// v(tau, x) = E[g(x + sqrt(tau) Z)].
class HeatSolution {
 public:
  HeatSolution(std::vector<double> taus, std::vector<double> xs, std::vector<double> values);

  /// Bilinear interpolation; throws DomainError outside the table.
  double value(double tau, double x) const;
  const std::vector<double>& taus() const noexcept { return taus_; }
  const std::vector<double>& xs() const noexcept { return xs_; }
  double at(std::size_t k, std::size_t j) const noexcept { return values_[k * xs_.size() + j]; }

 private:
  std::vector<double> taus_;
  std::vector<double> xs_;
  std::vector<double> values_;
};

/// Crank-Nicolson in tau with Dirichlet data at the far ends of the x grid.
/// `boundary(tau, x)` supplies those values.
HeatSolution solve_heat(const std::function<double(double)>& initial,
                        const std::function<double(double, double)>& boundary, double tau_max,
                        const HeatGridConfig& cfg = {});

}  // namespace volterra
