#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace volterra {

/// Nodes and weights of a Gaussian rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1]; cached per order.
const GaussRule& gauss_legendre(std::size_t order);

/// Probabilists' Gauss-Hermite rule: sum_i w_i f(z_i) ~ E[f(N(0,1))], weights sum to 1.
const GaussRule& gauss_hermite(std::size_t order);

/// Fixed-order Gauss-Legendre on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, std::size_t order = 16);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod on a smooth integrand.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double tolerance = 1e-10);

/// Integrable singularity at the right endpoint b: the interval is split
/// geometrically towards b and every piece is integrated adaptively.
QuadratureResult integrate_right_singular(const std::function<double(double)>& f, double a, double b,
                                          double tolerance = 1e-10);

/// Integral over [a, b] of h(s) * (s - a)^gamma with gamma > -1 and smooth h.
/// Panels are graded geometrically towards a; the innermost piece uses h(a).
double integrate_left_power(const std::function<double(double)>& h, double a, double b, double gamma,
                            std::size_t order = 16);

}  // namespace volterra
