#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace volterra {

/// Sample mean with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double std_dev = 0.0;
  std::size_t count = 0;

  double t_stat(double reference = 0.0) const noexcept;
  bool within(double reference, double n_se = 3.0) const noexcept;
};

/// Sequential (order-fixed) mean and standard error.
MeanEstimate estimate_mean(std::span<const double> samples);

/// Linear least-squares fit y = intercept + slope * x.
struct SlopeFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double half_width = 0.0;  ///< 95% confidence half-width of the slope
};

SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> samples, double q);

}  // namespace volterra
