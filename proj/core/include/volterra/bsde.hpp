#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "volterra/coefficients.hpp"
#include "volterra/fito.hpp"
#include "volterra/functional.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"

namespace volterra {

/// Semilinear backward equation
///   Y_t = g(X) + int_t^T f(s, X, Y_s, Z_s) ds - int_t^T Z_s dW_s.
struct BSDEProblem {
  /// f(t, path on [0, t], y, z); empty means f = 0.
  std::function<double(double t, const PathView& past, double y, std::span<const double> z)> driver;
  std::function<double(const PathView& full)> terminal;
  CoefficientSpec coeff;
  /// Caller-asserted Lipschitz constant of f in (y, z).
  double lipschitz_bound = 1.0;

  double eval_driver(double t, const PathView& past, double y, std::span<const double> z) const {
    return driver ? driver(t, past, y, z) : 0.0;
  }
  /// Checks the driver's Lipschitz bound on sampled (y, z) pairs along the given path.
  void validate(const PathView& sample_path) const;
};

/// Regression features at step i: every state component X_{t_i} and, for
/// each fraction f, the increment Theta^{t_i}_s - X_{t_i} of the first state
/// component at s = t_i + f (T - t_i). Polynomials up to `degree` in these.
struct FeatureSpec {
  std::vector<double> theta_fractions{1.0, 0.5};
  int degree = 2;

  void validate() const;
  std::string describe(std::size_t dim_state) const;
};

struct LsmcOptions {
  int picard_iterations = 2;
  double ridge = 1e-8;  ///< relative to the trace of the normal matrix
  /// Condition number above which the regression counts as rank deficient.
  double max_condition = 1e13;
};

struct BSDESolution {
  std::size_t path_count = 0;
  std::size_t n_steps = 0;
  std::size_t dim_noise = 1;
  std::vector<double> y_values;  ///< path-major, N + 1 values per path
  std::vector<double> z_values;  ///< path-major, N * k values per path
  std::string basis;
  std::vector<double> condition_numbers;  ///< per step, index i = 0..N-1
  std::vector<std::size_t> active_features;
  std::vector<std::string> warnings;
  /// Y_0 with the standard error of the pathwise terminal-plus-driver values.
  MeanEstimate y0;

  double y(std::size_t p, std::size_t i) const { return y_values[p * (n_steps + 1) + i]; }
  double z(std::size_t p, std::size_t i, std::size_t m = 0) const {
    return z_values[(p * n_steps + i) * dim_noise + m];
  }
};

/// Backward regression Monte Carlo on the ensemble. Throws SolverError
/// naming the step when a regression is rank deficient.
BSDESolution solve_lsmc(const BSDEProblem& problem, const PathEnsemble& ensemble, const FeatureSpec& features = {},
                        const LsmcOptions& opts = {});

struct FeynmanKacOptions {
  ItoOptions ito;
  std::size_t max_paths = 0;    ///< 0 uses every path
  std::size_t ppde_samples = 8;  ///< sampled (path, step) points for the PPDE residual
};

struct FeynmanKacReport {
  /// Per path Y_0 - g(X) - sum f dt + sum Z dW with Y_t = u(t, X (x)_t Theta^t).
  MeanEstimate residual;
  double rms = 0.0;
  /// d_t u + <d u, b> + 1/2 <d^2 u, (sigma, sigma)> + f(t, omega, u, <d u, sigma>) at sampled points.
  std::vector<double> ppde_residuals;
  double max_ppde_residual = 0.0;
};

/// Checks that a claimed PPDE solution u generates a BSDE solution along the ensemble paths.
FeynmanKacReport feynman_kac_check(const BSDEProblem& problem, const Functional& u, const PathEnsemble& ensemble,
                                   const FeynmanKacOptions& opts = {});

}  // namespace volterra
