#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace volterra {

/// Mean-reversion data of the variance equation: kernel exponent H, rate
/// lambda and level theta.
struct RelaxationParams {
  double hurst = 0.1;
  double rate = 0.0;
  double level = 0.0;

  double alpha() const noexcept { return hurst + 0.5; }
  void validate() const;
};

/// Product-integration weights c[k][m] with
///   int_{s_0}^{s_k} (s_k - r)^(beta - 1) phi(r) dr = sum_m c[k][m] phi(s_m)
/// exactly for phi piecewise linear on the (possibly non-uniform) nodes.
class ProductWeights {
 public:
  ProductWeights(std::span<const double> nodes, double beta);

  std::span<const double> row(std::size_t k) const noexcept { return {values_.data() + k * (k + 1) / 2, k + 1}; }
  /// int_{s_0}^{s_k} (s_k - r)^(beta - 1) dr.
  double total(std::size_t k) const noexcept { return totals_[k]; }
  std::size_t size() const noexcept { return totals_.size(); }

 private:
  std::vector<double> values_;
  std::vector<double> totals_;
};

/// Forward variance hat from the Theta curve on nodes s_0 = t < s_1 < ... by
/// solving hat = theta + (lambda / Gamma(alpha)) int_t^s (s - r)^(alpha - 1)
/// (level - hat_r) dr with hat piecewise linear (forward substitution).
std::vector<double> theta_to_hat(std::span<const double> nodes, std::span<const double> theta,
                                 const RelaxationParams& p);

/// The direct quadrature theta = hat - (lambda / Gamma(alpha)) int (s - r)^(alpha - 1) (level - hat_r) dr
/// with the same weights, so the two maps are exact inverses on the grid.
std::vector<double> hat_to_theta(std::span<const double> nodes, std::span<const double> hat,
                                 const RelaxationParams& p);

struct SeriesValue {
  double value = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

/// Resolvent series hat(s) = F(s) + sum_n (-lambda)^n / Gamma(n alpha) int_t^s (s - r)^(n alpha - 1) F(r) dr
/// with F = theta + lambda level (r - t)^alpha / Gamma(alpha + 1) and theta
/// piecewise linear on the nodes. Stops once |term| < 1e-14 |sum| or after
/// 200 terms.
SeriesValue theta_to_hat_series(std::span<const double> nodes, std::span<const double> theta,
                                const RelaxationParams& p, std::size_t index);

/// Largest lambda (s - t)^alpha for which the series is used; beyond it the
/// alternating terms lose too many digits.
inline constexpr double kSeriesCrossover = 20.0;

/// Grid solution checked against the series at the given indices. Throws
/// TransformError when the relative difference exceeds `tolerance`; indices
/// beyond the crossover are skipped.
std::vector<double> theta_to_hat_checked(std::span<const double> nodes, std::span<const double> theta,
                                         const RelaxationParams& p, std::span<const std::size_t> check_indices,
                                         double tolerance = 1e-6);

/// Nodes t + (T - t) (k / M)^grade, k = 0..M. Grading toward t resolves the
/// (s - t)^alpha behavior of hat near the anchor.
std::vector<double> graded_nodes(double t, double horizon, std::size_t m, double grade);

}  // namespace volterra
