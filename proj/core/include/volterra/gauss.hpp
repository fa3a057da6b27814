#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "volterra/fito.hpp"
#include "volterra/functional.hpp"
#include "volterra/heat_pde.hpp"
#include "volterra/kernel.hpp"
#include "volterra/path.hpp"
#include "volterra/payoff.hpp"
#include "volterra/simulate.hpp"

namespace volterra {

/// xi = g(X_T) + int_0^T f(t, X_t) dt with X = int_0^t K(t, r) dW_r.
struct LinearProblem {
  Payoff terminal = Payoff::identity();
  RunningCost running;
  KernelSpec kernel;
  double horizon = 1.0;

  /// Samples g and f on [-10, 10] x [0, T] and rejects non-finite values.
  void validate() const;
};

/// PDE tabulation of u_g and u_f for cross-checking the quadrature values.
struct PdeTables {
  HeatSolution terminal;
  std::vector<double> running_times;
  std::vector<HeatSolution> running;
};

class GaussFunctional {
 public:
  explicit GaussFunctional(LinearProblem problem);

  const LinearProblem& problem() const noexcept { return problem_; }

  /// sigma-bar(s, t) for t <= s.
  double sigma_bar(double s, double t) const;
  /// u_g(T; t, x) = E[g(x + sigma-bar(T, t) Z)].
  double u_g(double t, double x) const;
  /// u_f(s; t, x) = E[f(s, x + sigma-bar(s, t) Z)].
  double u_f(double s, double t, double x) const;

  /// Tabulates u_g and u_f (at `running_steps` + 1 times) by Crank-Nicolson in
  /// variance time.
  void tabulate_pde(const HeatGridConfig& cfg = {}, std::size_t running_steps = 16);
  bool has_pde_tables() const noexcept { return static_cast<bool>(tables_); }
  double u_g_pde(double t, double x) const;
  /// Requires s to be one of the tabulated running times.
  double u_f_pde(double s, double t, double x) const;

 private:
  LinearProblem problem_;
  std::shared_ptr<const PdeTables> tables_;
};

/// Y_t form: int_0^t f(s, w_s) ds + u_g(T; t, w_T) + int_t^T u_f(s; t, w_s) ds,
/// time integrals by the trapezoid rule on the knots of the path.
double eval_u(const GaussFunctional& fnl, double t, const Path& omega);
double eval_u(const GaussFunctional& fnl, const ConcatPath& path);

/// The same without the past integral int_0^t f: the function solving the
/// linear PPDE with terminal value g.
double eval_linear(const GaussFunctional& fnl, double t, const Path& omega);
double eval_linear(const GaussFunctional& fnl, const ConcatPath& path);

enum class FunctionalForm { Conditional, Linear };

/// Closed-form derivatives. The time derivative is that of eval_linear
/// (Linear) or of eval_u (Conditional); the two differ by f(t, w_t).
DerivativeBundle eval_derivatives(const GaussFunctional& fnl, double t, const Path& omega,
                                  FunctionalForm form = FunctionalForm::Linear);

/// Wraps eval_u / eval_linear, with closed-form derivatives attached when
/// `closed` is set.
Functional make_functional(std::shared_ptr<const GaussFunctional> fnl,
                           FunctionalForm form = FunctionalForm::Linear, bool closed = true);

enum class DerivativeMode { ClosedForm, FiniteDifference };

struct ResidualOptions {
  DerivativeMode mode = DerivativeMode::ClosedForm;
  PairingOptions pairing;
  /// Used in finite-difference mode; a zero time step means 1e-5 * T.
  FDConfig fd;
};

/// d_t u + (1/2) <d^2 u, (K^t, K^t)> + f(t, w_t) for the linear form. Singular
/// kernels pair through the truncated limit; a failed limit raises
/// EvaluationError carrying the sequence.
double ppde_residual(const GaussFunctional& fnl, double t, const Path& omega, const ResidualOptions& opts = {});

/// p^H(t, x) = exp(-x^2 / (2 t^{2H})) / (sqrt(2 pi) t^H).
double density_pH(double t, double x, double hurst);

/// Markovian comparator u~(t, x) = E[g(x + (T - t)^H Z)] (f must be zero).
double eval_tilde_u(const LinearProblem& problem, double t, double x);

}  // namespace volterra
