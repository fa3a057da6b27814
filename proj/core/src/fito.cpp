#include "volterra/fito.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

void FDConfig::validate() const {
  if (epsilon != 0.0 && !(epsilon >= 1e-8 && epsilon <= 1e-2))
    throw ConfigError("finite-difference epsilon must lie in [1e-8, 1e-2]");
  if (time_step < 0.0 || !std::isfinite(time_step)) throw ConfigError("finite-difference time step must be >= 0");
}

double FDConfig::epsilon_for(const Path& omega) const {
  validate();
  return epsilon > 0.0 ? epsilon : 1e-4 * (1.0 + omega.sup_norm());
}

double directional_derivative(const Functional& u, double t, const Path& omega, const Direction& eta,
                              const FDConfig& cfg) {
  const double eps = cfg.epsilon_for(omega);
  const double up = u(t, bump(omega, t, eps, eta));
  if (cfg.scheme == FDScheme::Forward) return (up - u(t, omega)) / eps;
  const double down = u(t, bump(omega, t, -eps, eta));
  return (up - down) / (2.0 * eps);
}

double second_directional(const Functional& u, double t, const Path& omega, const Direction& eta1,
                          const Direction& eta2, const FDConfig& cfg) {
  const double eps = cfg.epsilon_for(omega);
  auto at = [&](double a, double b) { return u(t, bump(bump(omega, t, a * eps, eta1), t, b * eps, eta2)); };
  return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * eps * eps);
}

double right_time_derivative(const Functional& u, double t, const Path& omega, const FDConfig& cfg) {
  cfg.validate();
  if (!(cfg.time_step > 0.0)) throw ConfigError("right time derivative needs a positive time step");
  const double h = std::min(cfg.time_step, omega.horizon() - t);
  if (!(h > 0.0)) throw DomainError("right time derivative requested at the horizon");
  return (u(t + h, omega) - u(t, omega)) / h;
}

namespace {

struct LocalValues {
  double beta = 0.0;
  std::vector<double> gamma;
};

LocalValues local_values(const CoefficientSpec& coeff, double t, const PathView& view) {
  if (coeff.dim_state != 1) throw ConfigError("path-derivative tools work on scalar state paths");
  LocalValues lv;
  lv.gamma.assign(coeff.dim_noise, 0.0);
  if (coeff.has_drift()) coeff.local_drift(t, view, std::span<double>(&lv.beta, 1));
  coeff.local_diffusion(t, view, lv.gamma);
  return lv;
}

LocalValues local_values_on(const CoefficientSpec& coeff, double t, const Path& omega,
                            const std::optional<TimeGrid>& grid) {
  const TimeGrid g = grid ? *grid : TimeGrid(omega.horizon(), 256);
  const auto step = static_cast<std::size_t>(std::floor(t / g.dt() + 1e-9));
  const std::size_t last = std::min(step, g.n_steps());
  std::vector<double> states(g.n_steps() + 1, 0.0);
  for (std::size_t j = 0; j <= last; ++j) states[j] = omega(g.time(j));
  return local_values(coeff, t, PathView(states, 1, last, g));
}

// One pairing of u's derivative(s) with the given directions.
class Pairer {
 public:
  Pairer(const Functional& u, double t, const Path& omega, bool use_closed, const FDConfig& fd)
      : u_(u), t_(t), omega_(omega), fd_(fd) {
    if (use_closed && u.has_closed_derivatives()) bundle_ = u.closed_derivatives(t, omega);
  }

  double first(const Direction& eta) const {
    return bundle_ ? bundle_->first(eta) : directional_derivative(u_, t_, omega_, eta, fd_);
  }
  double second(const Direction& a, const Direction& b) const {
    return bundle_ ? bundle_->second(a, b) : second_directional(u_, t_, omega_, a, b, fd_);
  }
  double time() const { return bundle_ ? bundle_->time_derivative : right_time_derivative(u_, t_, omega_, fd_); }

 private:
  const Functional& u_;
  double t_;
  const Path& omega_;
  FDConfig fd_;
  std::optional<DerivativeBundle> bundle_;
};

double pair_value(const Pairer& pairer, const CoefficientSpec& coeff, const LocalValues& lv, double t,
                  PairingKind which, std::size_t column, double delta) {
  switch (which) {
    case PairingKind::Drift: {
      const auto k = delta > 0.0 ? coeff.drift_kernel.truncated(delta) : coeff.drift_kernel;
      return pairer.first(kernel_direction(k, t, lv.beta));
    }
    case PairingKind::Diffusion: {
      const auto k = delta > 0.0 ? coeff.diffusion_kernel.truncated(delta) : coeff.diffusion_kernel;
      return pairer.first(kernel_direction(k, t, lv.gamma.at(column)));
    }
    case PairingKind::Second: {
      const auto k = delta > 0.0 ? coeff.diffusion_kernel.truncated(delta) : coeff.diffusion_kernel;
      double sum = 0.0;
      for (double g : lv.gamma) {
        if (g == 0.0) continue;
        const auto dir = kernel_direction(k, t, g);
        sum += pairer.second(dir, dir);
      }
      return sum;
    }
  }
  return 0.0;
}

SingularPairing pairing_sequence(const Pairer& pairer, const CoefficientSpec& coeff, const LocalValues& lv, double t,
                                 PairingKind which, std::size_t column, const PairingOptions& opts) {
  if (opts.n_max <= opts.n_min) throw ConfigError("pairing sequence needs n_max > n_min");
  std::vector<double> deltas, values;
  for (int n = opts.n_min; n <= opts.n_max; ++n) {
    const double delta = std::ldexp(1.0, -n);
    deltas.push_back(delta);
    values.push_back(pair_value(pairer, coeff, lv, t, which, column, delta));
  }
  return fit_pairing_sequence(std::move(deltas), std::move(values), which, opts);
}

bool kernel_is_singular(const KernelSpec& k) { return k.singular() && k.family() != KernelFamily::Constant; }

}  // namespace

SingularPairing fit_pairing_sequence(std::vector<double> deltas, std::vector<double> values, PairingKind kind,
                                     const PairingOptions& opts) {
  if (deltas.size() != values.size() || values.size() < 2)
    throw ConfigError("pairing sequence needs matching deltas and values");
  for (double v : values)
    if (!std::isfinite(v)) throw NonConvergenceError("pairing sequence has non-finite values", deltas, values);

  SingularPairing out;
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-13 * scale;
  const std::size_t n = values.size();
  std::vector<double> diff(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = values[i + 1] - values[i];

  // A sequence that stops moving (kernel support separated from the direction)
  // has converged exactly.
  const bool tail_constant = std::abs(diff[n - 2]) <= tol && (n < 3 || std::abs(diff[n - 3]) <= tol);
  if (tail_constant) {
    out.deltas = std::move(deltas);
    out.values = std::move(values);
    out.extrapolated = out.values.back();
    out.observed_rate = std::numeric_limits<double>::infinity();
    out.fitted_exponent = std::numeric_limits<double>::infinity();
    out.exact = true;
    return out;
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(diff[i]) <= tol) continue;
    lx.push_back(std::log(deltas[i]));
    ly.push_back(std::log(std::abs(diff[i])));
  }
  if (lx.size() < opts.min_points)
    throw NonConvergenceError("pairing sequence has too few usable differences", deltas, values);
  const SlopeFit fit = fit_line(lx, ly);
  if (!(fit.r_squared >= opts.min_r_squared) || !(fit.slope > 0.0))
    throw NonConvergenceError("pairing sequence fails the rate test (slope " + std::to_string(fit.slope) +
                                  ", r^2 " + std::to_string(fit.r_squared) + ")",
                              deltas, values);

  // Successive deltas halve, so the differences shrink by r = 2^-q.
  const double ratio = std::pow(0.5, fit.slope);
  out.extrapolated = values.back() + diff.back() * ratio / (1.0 - ratio);
  out.fitted_exponent = fit.slope;
  out.observed_rate = kind == PairingKind::Second ? 0.5 * fit.slope : fit.slope;
  out.r_squared = fit.r_squared;
  out.deltas = std::move(deltas);
  out.values = std::move(values);
  return out;
}

SingularPairing singular_pairing(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                                 PairingKind which, const PairingOptions& opts) {
  const Pairer pairer(u, t, omega, opts.use_closed, opts.fd);
  const auto lv = local_values_on(coeff, t, omega, opts.grid);
  return pairing_sequence(pairer, coeff, lv, t, which, 0, opts);
}

double direct_pairing(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                      PairingKind which, const PairingOptions& opts) {
  const Pairer pairer(u, t, omega, opts.use_closed, opts.fd);
  const auto lv = local_values_on(coeff, t, omega, opts.grid);
  return pair_value(pairer, coeff, lv, t, which, 0, 0.0);
}

GeneratorTerms generator_terms(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                               const PathView& past, const ItoOptions& opts, bool diffusion_only) {
  FDConfig fd = opts.fd;
  if (fd.time_step == 0.0) fd.time_step = 0.25 * past.grid().dt();
  PairingOptions popts = opts.pairing;
  popts.fd = fd;
  const bool drift_singular = kernel_is_singular(coeff.drift_kernel) && opts.singular_limit;
  const bool diff_singular = kernel_is_singular(coeff.diffusion_kernel) && opts.singular_limit;

  const Pairer pairer(u, t, omega, opts.use_closed, fd);
  const auto lv = local_values(coeff, t, past);
  GeneratorTerms out;
  auto pairing = [&](PairingKind kind, bool singular, std::size_t column) {
    if (!singular) return pair_value(pairer, coeff, lv, t, kind, column, 0.0);
    const auto sp = pairing_sequence(pairer, coeff, lv, t, kind, column, popts);
    if (!sp.exact) out.observed_rates.push_back(sp.observed_rate);
    return sp.extrapolated;
  };
  if (!diffusion_only) {
    out.time = pairer.time();
    if (coeff.has_drift() && lv.beta != 0.0) out.drift = pairing(PairingKind::Drift, drift_singular, 0);
    out.second = pairing(PairingKind::Second, diff_singular, 0);
  }
  out.diffusion.assign(coeff.dim_noise, 0.0);
  for (std::size_t m = 0; m < coeff.dim_noise; ++m)
    if (lv.gamma[m] != 0.0) out.diffusion[m] = pairing(PairingKind::Diffusion, diff_singular, m);
  return out;
}

namespace {

struct PathResult {
  double mismatch = 0.0;
  std::vector<double> rates;
};

PathResult certify_path(const Functional& u, const CoefficientSpec& coeff, const PathEnsemble& ens, std::size_t p,
                        const ItoOptions& opts, bool collect_rates) {
  const TimeGrid& grid = ens.grid;
  const std::size_t n = grid.n_steps();
  const double dt = grid.dt();
  const ThetaField field = theta_field(ens, coeff, p);
  const auto states = ens.path_states(p);

  PathResult res;
  double sum = 0.0;
  double u0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.time(i);
    const Path omega = concat(field, i).to_path();
    if (i == 0) u0 = u(t, omega);
    const auto terms = generator_terms(u, t, omega, coeff, PathView(states, 1, i, grid), opts);
    if (collect_rates) res.rates.insert(res.rates.end(), terms.observed_rates.begin(), terms.observed_rates.end());
    double mart = 0.0;
    for (std::size_t m = 0; m < coeff.dim_noise; ++m) mart += terms.diffusion[m] * ens.increment(p, i, m);
    sum += (terms.time + terms.drift + 0.5 * terms.second) * dt + mart;
  }
  const double uT = u(grid.horizon(), ens.path(p));
  res.mismatch = uT - u0 - sum;
  return res;
}

}  // namespace

ItoReport ito_certify(const Functional& u, const CoefficientSpec& coeff, const PathEnsemble& ensemble,
                      const ItoOptions& opts) {
  coeff.validate();
  opts.fd.validate();
  if (coeff.dim_state != 1) throw ConfigError("Ito certification works on scalar state paths");
  if (opts.coarsen_factors.empty()) throw ConfigError("Ito certification needs at least one level");

  ItoReport report;
  for (std::size_t factor : opts.coarsen_factors) {
    const PathEnsemble level = factor == 1 ? ensemble : coarsen(ensemble, coeff, factor);
    const std::size_t paths = opts.max_paths > 0 ? std::min(opts.max_paths, level.path_count) : level.path_count;
    std::vector<PathResult> results(paths);
    parallel_for(paths, [&](std::size_t begin, std::size_t end) {
      for (std::size_t p = begin; p < end; ++p)
        results[p] = certify_path(u, coeff, level, p, opts, p == 0 && report.levels.empty());
    });
    std::vector<double> mismatch(paths);
    double sq = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
      mismatch[p] = results[p].mismatch;
      sq += mismatch[p] * mismatch[p];
    }
    if (!results.empty() && report.levels.empty()) report.pairing_rates = results[0].rates;
    ItoLevel lvl;
    lvl.n_steps = level.grid.n_steps();
    lvl.dt = level.grid.dt();
    lvl.rms = paths > 0 ? std::sqrt(sq / static_cast<double>(paths)) : 0.0;
    lvl.mismatch = estimate_mean(mismatch);
    report.levels.push_back(lvl);
  }
  if (report.levels.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& l : report.levels) {
      if (!(l.rms > 0.0)) continue;
      x.push_back(std::log(l.dt));
      y.push_back(std::log(l.rms));
    }
    if (x.size() >= 2) report.order = fit_line(x, y);
  }
  return report;
}

}  // namespace volterra
