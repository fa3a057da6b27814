#include "volterra/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/errors.hpp"

namespace volterra {

double MeanEstimate::t_stat(double reference) const noexcept {
  const double diff = mean - reference;
  if (std_error > 0.0) return diff / std_error;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

bool MeanEstimate::within(double reference, double n_se) const noexcept {
  return std::abs(mean - reference) <= n_se * std_error;
}

MeanEstimate estimate_mean(std::span<const double> samples) {
  MeanEstimate out;
  out.count = samples.size();
  if (samples.empty()) return out;
  // Two-pass for accuracy; the summation order is fixed for reproducibility.
  double sum = 0.0;
  for (double v : samples) sum += v;
  out.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - out.mean) * (v - out.mean);
    out.std_dev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    out.std_error = out.std_dev / std::sqrt(static_cast<double>(samples.size()));
  }
  return out;
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("fit_line: abscissae and ordinates differ in length");
  if (x.size() < 2) throw ConfigError("fit_line: need at least two points");
  SlopeFit fit;
  fit.abscissae.assign(x.begin(), x.end());
  fit.ordinates.assign(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("fit_line: abscissae are all equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  if (x.size() > 2) {
    const double resid = std::max(0.0, syy - fit.slope * sxy);
    const double se = std::sqrt(resid / (n - 2.0) / sxx);
    boost::math::students_t dist(n - 2.0);
    fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  }
  return fit;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

}  // namespace volterra
