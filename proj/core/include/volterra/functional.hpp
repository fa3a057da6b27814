#pragma once

#include <functional>

#include "volterra/path.hpp"

namespace volterra {

/// Closed-form derivatives of a functional at one (t, omega):
/// time_derivative = d/dt u(t, omega) with omega frozen, first(eta) the
/// pairing <d_omega u, eta>, second(eta1, eta2) the bilinear pairing.
struct DerivativeBundle {
  double time_derivative = 0.0;
  std::function<double(const Direction&)> first;
  std::function<double(const Direction&, const Direction&)> second;
};

/// An evaluatable u(t, omega) on paths over [0, T]. The values of omega on
/// [t, T] play the role of theta in omega (x)_t theta.
struct Functional {
  std::function<double(double t, const Path& omega)> eval;
  std::function<DerivativeBundle(double t, const Path& omega)> closed_derivatives;

  double operator()(double t, const Path& omega) const { return eval(t, omega); }
  bool has_closed_derivatives() const noexcept { return static_cast<bool>(closed_derivatives); }
};

}  // namespace volterra
