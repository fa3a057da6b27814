#include "volterra/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "volterra/coefficients.hpp"
#include "volterra/errors.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

void LinearProblem::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("linear problem horizon must be positive");
  for (int i = -10; i <= 10; ++i) {
    const double x = i;
    if (!std::isfinite(terminal(x))) throw ConfigError("terminal payoff is not finite at x = " + std::to_string(x));
    if (running.is_zero()) continue;
    for (int k = 0; k <= 4; ++k) {
      const double t = horizon * k / 4.0;
      const double f = running(t, x);
      if (!std::isfinite(f)) throw ConfigError("running cost is not finite");
      const double h = 1e-8 * horizon;
      const double tn = k == 4 ? t - h : t + h;
      if (std::abs(running(tn, x) - f) > 1e-4 * (1.0 + std::abs(f)))
        throw ConfigError("running cost looks discontinuous in t");
    }
  }
}

GaussFunctional::GaussFunctional(LinearProblem problem) : problem_(std::move(problem)) { problem_.validate(); }

double GaussFunctional::sigma_bar(double s, double t) const {
  if (s < t) throw DomainError("sigma-bar(s, t) needs t <= s");
  if (s == t) return 0.0;
  return std::sqrt(cumulative_variance(problem_.kernel, t, s));
}

namespace {

std::vector<double> kink_locations(const Payoff& g) {
  std::vector<double> out;
  for (const auto& k : g.kinks()) out.push_back(k.location);
  return out;
}

}  // namespace

double GaussFunctional::u_g(double t, double x) const {
  const auto kinks = kink_locations(problem_.terminal);
  return gaussian_expectation([this](double y) { return problem_.terminal(y); }, x, sigma_bar(problem_.horizon, t),
                              kinks);
}

double GaussFunctional::u_f(double s, double t, double x) const {
  if (problem_.running.is_zero()) return 0.0;
  return gaussian_expectation([this, s](double y) { return problem_.running(s, y); }, x, sigma_bar(s, t));
}

void GaussFunctional::tabulate_pde(const HeatGridConfig& cfg, std::size_t running_steps) {
  const double T = problem_.horizon;
  auto tables = std::make_shared<PdeTables>(PdeTables{
      solve_heat([this](double x) { return problem_.terminal(x); },
                 [this](double tau, double x) {
                   return gaussian_expectation([this](double y) { return problem_.terminal(y); }, x, std::sqrt(tau),
                                               kink_locations(problem_.terminal));
                 },
                 sigma_bar(T, 0.0) * sigma_bar(T, 0.0), cfg),
      {},
      {}});
  if (!problem_.running.is_zero()) {
    if (running_steps == 0) throw ConfigError("running-cost tabulation needs at least one step");
    for (std::size_t k = 0; k <= running_steps; ++k) {
      const double s = T * static_cast<double>(k) / static_cast<double>(running_steps);
      const double sb = sigma_bar(s, 0.0);
      tables->running_times.push_back(s);
      tables->running.push_back(solve_heat(
          [this, s](double x) { return problem_.running(s, x); },
          [this, s](double tau, double x) {
            return gaussian_expectation([this, s](double y) { return problem_.running(s, y); }, x, std::sqrt(tau));
          },
          sb * sb, cfg));
    }
  }
  tables_ = std::move(tables);
}

double GaussFunctional::u_g_pde(double t, double x) const {
  if (!tables_) throw ConfigError("PDE tables were not built");
  const double sb = sigma_bar(problem_.horizon, t);
  return tables_->terminal.value(sb * sb, x);
}

double GaussFunctional::u_f_pde(double s, double t, double x) const {
  if (!tables_) throw ConfigError("PDE tables were not built");
  if (problem_.running.is_zero()) return 0.0;
  const auto& times = tables_->running_times;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - s) <= 1e-12 * problem_.horizon) {
      const double sb = sigma_bar(s, t);
      return tables_->running[k].value(sb * sb, x);
    }
  }
  throw DomainError("u_f is tabulated only at the running-cost times");
}

double eval_linear(const GaussFunctional& fnl, double t, const Path& omega) {
  const auto& pb = fnl.problem();
  const double T = pb.horizon;
  if (t < 0.0 || t > T) throw DomainError("evaluation time outside [0, T]");
  double value = fnl.u_g(t, omega(T));
  if (!pb.running.is_zero() && t < T)
    value += trapezoid(omega, t, T, [&](double s, double x) { return fnl.u_f(s, t, x); });
  return value;
}

double eval_u(const GaussFunctional& fnl, double t, const Path& omega) {
  const auto& pb = fnl.problem();
  double past = 0.0;
  if (!pb.running.is_zero() && t > 0.0)
    past = trapezoid(omega, 0.0, t, [&](double s, double x) { return pb.running(s, x); });
  return past + eval_linear(fnl, t, omega);
}

double eval_u(const GaussFunctional& fnl, const ConcatPath& path) {
  return eval_u(fnl, path.split_time(), path.to_path());
}

double eval_linear(const GaussFunctional& fnl, const ConcatPath& path) {
  return eval_linear(fnl, path.split_time(), path.to_path());
}

namespace {

constexpr std::size_t kLambdaOrderTerminal = 24;
constexpr std::size_t kLambdaOrderRunning = 12;

// int_t^T F(s) ds where F may behave like (s - t)^exponent near t. Panels
// follow the knots of omega and the breakpoints of the directions.
double integrate_future(const std::function<double(double)>& F, double t, double T, double exponent,
                        const Path& omega, const std::vector<double>& breakpoints) {
  std::vector<double> cuts{t, T};
  for (double s : omega.times())
    if (s > t && s < T) cuts.push_back(s);
  for (double s : breakpoints)
    if (s > t && s < T) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double sum = 0.0;
  for (std::size_t p = 1; p < cuts.size(); ++p) {
    const double a = cuts[p - 1], b = cuts[p];
    if (p == 1 && exponent < 0.0) {
      sum += integrate_left_power([&](double s) { return F(s) / std::pow(s - t, exponent); }, a, b, exponent);
    } else if (a > t) {
      // Directions anchored at t vary on the scale of the distance to t, so
      // the panel is split geometrically: every piece [x, y] has y - t <= 2 (x - t).
      for (double x = a; x < b;) {
        const double y = std::min(b, t + 2.0 * (x - t));
        sum += integrate_gl(F, x, y, 16);
        x = y;
      }
    } else {
      sum += integrate_gl(F, a, b, 16);
    }
  }
  return sum;
}

double power_at(const Direction& d, double t) {
  return (d.exponent != 0.0 && std::abs(d.anchor - t) <= 1e-14 * (1.0 + std::abs(t))) ? d.exponent : 0.0;
}

std::vector<double> merged_breakpoints(const Direction& a, const Direction* b = nullptr) {
  std::vector<double> out = a.breakpoints;
  if (b) out.insert(out.end(), b->breakpoints.begin(), b->breakpoints.end());
  return out;
}

// int_0^1 E[g''(x + l sigma Z) Z^2] dl. The Dirac masses of g'' integrate
// over lambda in closed form to jump * phi(z) / sigma.
double terminal_lambda_average(const Payoff& g, double x, double sigma) {
  if (sigma <= 0.0) return g.second(x);
  const auto kinks = kink_locations(g);
  const auto& rule = gauss_legendre(kLambdaOrderTerminal);
  double smooth = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double lambda = 0.5 * (rule.nodes[i] + 1.0);
    const double ls = lambda * sigma;
    smooth += 0.5 * rule.weights[i] *
              gaussian_expectation(
                  [&](double y) {
                    const double z = (y - x) / ls;
                    return g.second(y) * z * z;
                  },
                  x, ls, kinks);
  }
  double dirac = 0.0;
  for (const auto& k : g.kinks()) dirac += k.jump * normal_pdf((k.location - x) / sigma) / sigma;
  return smooth + dirac;
}

double running_lambda_average(const RunningCost& f, double s, double x, double sigma) {
  if (sigma <= 0.0) return f.dxx(s, x);
  const auto& rule = gauss_legendre(kLambdaOrderRunning);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ls = 0.5 * (rule.nodes[i] + 1.0) * sigma;
    sum += 0.5 * rule.weights[i] * gaussian_expectation(
                                       [&](double y) {
                                         const double z = (y - x) / ls;
                                         return f.dxx(s, y) * z * z;
                                       },
                                       x, ls);
  }
  return sum;
}

void require_running_derivatives(const RunningCost& f) {
  if (!f.is_zero() && (!f.dx || !f.dxx))
    throw ConfigError("closed-form derivatives need the running cost's x-derivatives");
}

}  // namespace

DerivativeBundle eval_derivatives(const GaussFunctional& fnl, double t, const Path& omega, FunctionalForm form) {
  const auto& pb = fnl.problem();
  const double T = pb.horizon;
  if (!(t >= 0.0 && t < T)) throw DomainError("closed-form derivatives need 0 <= t < T");
  require_running_derivatives(pb.running);

  const double xT = omega(T);
  const double sT = fnl.sigma_bar(T, t);
  const auto kinks = kink_locations(pb.terminal);
  const double eg1 = gaussian_expectation([g = pb.terminal](double y) { return g.first(y); }, xT, sT, kinks);
  const double eg2 = gaussian_expectation_second(pb.terminal, xT, sT);
  const bool has_f = !pb.running.is_zero();

  DerivativeBundle out;
  const double kT = pb.kernel(T, t);
  double dt = -0.5 * kT * kT * terminal_lambda_average(pb.terminal, xT, sT);
  if (has_f) {
    const Direction kdir = kernel_direction(pb.kernel, t);
    auto integrand = [&](double s) {
      const double k = kdir(s);
      return k * k * running_lambda_average(pb.running, s, omega(s), fnl.sigma_bar(s, t));
    };
    dt -= 0.5 * integrate_future(integrand, t, T, 2.0 * power_at(kdir, t), omega, kdir.breakpoints);
    if (form == FunctionalForm::Linear) dt -= pb.running(t, omega(t));
  }
  out.time_derivative = dt;

  auto fnl_ptr = &fnl;
  const Path omega_copy = omega;
  out.first = [fnl_ptr, omega_copy, t, T, eg1, has_f](const Direction& eta) {
    double v = eg1 * eta(T);
    if (has_f) {
      const auto& f = fnl_ptr->problem().running;
      auto integrand = [&](double s) {
        return gaussian_expectation([&](double y) { return f.dx(s, y); }, omega_copy(s), fnl_ptr->sigma_bar(s, t)) *
               eta(s);
      };
      v += integrate_future(integrand, t, T, power_at(eta, t), omega_copy, merged_breakpoints(eta));
    }
    return v;
  };
  out.second = [fnl_ptr, omega_copy, t, T, eg2, has_f](const Direction& a, const Direction& b) {
    double v = eg2 * a(T) * b(T);
    if (has_f) {
      const auto& f = fnl_ptr->problem().running;
      auto integrand = [&](double s) {
        return gaussian_expectation([&](double y) { return f.dxx(s, y); }, omega_copy(s), fnl_ptr->sigma_bar(s, t)) *
               a(s) * b(s);
      };
      v += integrate_future(integrand, t, T, power_at(a, t) + power_at(b, t), omega_copy, merged_breakpoints(a, &b));
    }
    return v;
  };
  return out;
}

Functional make_functional(std::shared_ptr<const GaussFunctional> fnl, FunctionalForm form, bool closed) {
  Functional u;
  if (form == FunctionalForm::Linear)
    u.eval = [fnl](double t, const Path& w) { return eval_linear(*fnl, t, w); };
  else
    u.eval = [fnl](double t, const Path& w) { return eval_u(*fnl, t, w); };
  if (closed)
    u.closed_derivatives = [fnl, form](double t, const Path& w) { return eval_derivatives(*fnl, t, w, form); };
  return u;
}

double ppde_residual(const GaussFunctional& fnl, double t, const Path& omega, const ResidualOptions& opts) {
  const auto& pb = fnl.problem();
  const double T = pb.horizon;
  if (!(t >= 0.0 && t < T)) throw DomainError("PPDE residual needs 0 <= t < T");
  // Non-owning handle: the functional outlives this call.
  const std::shared_ptr<const GaussFunctional> handle(&fnl, [](const GaussFunctional*) {});
  const bool closed = opts.mode == DerivativeMode::ClosedForm;
  const Functional u = make_functional(handle, FunctionalForm::Linear, closed);

  FDConfig fd = opts.fd;
  if (fd.time_step == 0.0) fd.time_step = 1e-5 * T;
  PairingOptions popts = opts.pairing;
  popts.use_closed = closed;
  popts.fd = fd;

  double time_part = 0.0;
  std::optional<DerivativeBundle> bundle;
  if (closed) {
    bundle = eval_derivatives(fnl, t, omega, FunctionalForm::Linear);
    time_part = bundle->time_derivative;
  } else {
    time_part = right_time_derivative(u, t, omega, fd);
  }

  const CoefficientSpec coeff = CoefficientSpec::gaussian(pb.kernel);
  double pairing = 0.0;
  if (pb.kernel.singular() && pb.kernel.family() != KernelFamily::Constant) {
    try {
      pairing = singular_pairing(u, t, omega, coeff, PairingKind::Second, popts).extrapolated;
    } catch (const NonConvergenceError& e) {
      std::ostringstream msg;
      msg << "PPDE residual: singular pairing did not converge (" << e.what() << "); values:";
      for (double v : e.values()) msg << ' ' << v;
      throw EvaluationError(msg.str());
    }
  } else {
    const Direction k = kernel_direction(pb.kernel, t);
    pairing = closed ? bundle->second(k, k) : second_directional(u, t, omega, k, k, fd);
  }
  return time_part + 0.5 * pairing + pb.running(t, omega(t));
}

double density_pH(double t, double x, double hurst) {
  if (!(t > 0.0)) throw DomainError("p^H needs t > 0");
  const double th = std::pow(t, hurst);
  return std::exp(-x * x / (2.0 * th * th)) / (std::sqrt(2.0 * std::numbers::pi) * th);
}

double eval_tilde_u(const LinearProblem& problem, double t, double x) {
  if (!problem.running.is_zero()) throw ConfigError("the Markovian comparator needs a zero running cost");
  if (t < 0.0 || t > problem.horizon) throw DomainError("evaluation time outside [0, T]");
  const double sd = std::pow(problem.horizon - t, problem.kernel.hurst());
  const auto kinks = kink_locations(problem.terminal);
  return gaussian_expectation([&](double y) { return problem.terminal(y); }, x, sd, kinks);
}

}  // namespace volterra
