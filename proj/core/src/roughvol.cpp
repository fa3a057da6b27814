#include "volterra/roughvol.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"

namespace volterra {

void RoughHestonParams::validate() const {
  if (!(s0 > 0.0)) throw ConfigError("rough Heston s0 must be positive");
  if (!(v0 >= 0.0)) throw ConfigError("rough Heston v0 must be >= 0");
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("rough Heston hurst must lie in (0, 1)");
  if (!(mean_rev_rate >= 0.0) || !(mean_rev_level >= 0.0) || !(vol_of_vol >= 0.0))
    throw ConfigError("rough Heston lambda, theta and nu must be >= 0");
  if (!(std::abs(correlation) <= 1.0)) throw ConfigError("correlation must lie in [-1, 1]");
}

void RoughBergomiParams::validate() const {
  if (!(s0 > 0.0)) throw ConfigError("rough Bergomi s0 must be positive");
  if (!(v0 > 0.0)) throw ConfigError("rough Bergomi v0 must be positive");
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("rough Bergomi hurst must lie in (0, 1)");
  if (!(vol_of_vol >= 0.0)) throw ConfigError("rough Bergomi vol-of-vol must be >= 0");
  if (!(std::abs(correlation) <= 1.0)) throw ConfigError("correlation must lie in [-1, 1]");
}

VolatilityModel::VolatilityModel(VolModelKind kind, CoefficientSpec driver, const TimeGrid& grid)
    : kind_(kind), stepper_(std::move(driver), grid) {}

VolatilityModel VolatilityModel::heston(const RoughHestonParams& p, const TimeGrid& grid) {
  p.validate();
  const double alpha = p.hurst + 0.5;
  // (t - r)^(H - 1/2) / Gamma(alpha) written as a normalized RL kernel.
  const auto kernel = KernelSpec::riemann_liouville(p.hurst, 1.0 / (std::tgamma(alpha) * std::sqrt(2.0 * p.hurst)));
  CoefficientSpec c;
  c.dim_state = 1;
  c.dim_noise = 2;
  c.initial = {p.v0};
  c.drift_kernel = kernel;
  c.diffusion_kernel = kernel;
  const double lam = p.mean_rev_rate, th = p.mean_rev_level, nu = p.vol_of_vol;
  c.drift = [lam, th](double, const PathView& past, std::span<double> out) {
    out[0] = lam * (th - std::max(past.current()[0], 0.0));
  };
  c.diffusion = [nu](double, const PathView& past, std::span<double> out) {
    out[0] = 0.0;
    out[1] = nu * std::sqrt(std::max(past.current()[0], 0.0));
  };
  VolatilityModel m(VolModelKind::RoughHeston, std::move(c), grid);
  m.s0_ = p.s0;
  m.v0_ = p.v0;
  m.hurst_ = p.hurst;
  m.rho_ = p.correlation;
  m.heston_ = p;
  return m;
}

VolatilityModel VolatilityModel::bergomi(const RoughBergomiParams& p, const TimeGrid& grid) {
  p.validate();
  CoefficientSpec c;
  c.dim_state = 1;
  c.dim_noise = 2;
  c.initial = {0.0};
  c.drift_kernel = KernelSpec::riemann_liouville(p.hurst);
  c.diffusion_kernel = c.drift_kernel;
  const double lam = p.vol_of_vol;
  c.diffusion = [lam](double, const PathView&, std::span<double> out) {
    out[0] = 0.0;
    out[1] = lam;
  };
  VolatilityModel m(VolModelKind::RoughBergomi, std::move(c), grid);
  m.s0_ = p.s0;
  m.v0_ = p.v0;
  m.hurst_ = p.hurst;
  m.rho_ = p.correlation;
  m.bergomi_lambda_ = lam;
  m.bergomi_ = p;
  return m;
}

double VolatilityModel::variance(double x, std::size_t step) const {
  if (kind_ == VolModelKind::RoughHeston) return std::max(x, 0.0);
  const double t = grid().time(step);
  return v0_ * std::exp(x - 0.5 * bergomi_lambda_ * bergomi_lambda_ * std::pow(t, 2.0 * hurst_));
}

namespace {

// Exact lognormal stock steps from `first` given the driver values on
// steps first..N. `driver(j)` returns x_j.
template <class Driver, class Visit>
double step_stock(const VolatilityModel& m, std::size_t first, double spot, Driver driver,
                  std::span<const double> noise, std::size_t* cap_hits, Visit visit) {
  const TimeGrid& g = m.grid();
  const double dt = g.dt();
  const double rho = m.correlation();
  const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  double s = spot;
  visit(first, s);
  bool capped = false;
  for (std::size_t i = first; i < g.n_steps(); ++i) {
    const double v = m.variance(driver(i), i);
    const double dw = rho * noise[2 * i + 1] + rho_bar * noise[2 * i];
    s *= std::exp(std::sqrt(v) * dw - 0.5 * v * dt);
    if (s > VolatilityModel::kStockCap) {
      s = VolatilityModel::kStockCap;
      capped = true;
    }
    visit(i + 1, s);
  }
  if (capped && cap_hits) ++*cap_hits;
  return s;
}

}  // namespace

void VolatilityModel::run_path(std::span<const double> noise, std::span<double> states, std::size_t path_id,
                               const VolterraStepper::RowCallback* rows, std::size_t* cap_hits) const {
  const std::size_t n = grid().n_steps();
  if (noise.size() < 2 * n || states.size() < 2 * (n + 1)) throw ConfigError("path buffers too small");
  std::vector<double> x(n + 1);
  stepper_.run(noise, x, path_id, rows);
  step_stock(
      *this, 0, s0_, [&](std::size_t j) { return x[j]; }, noise, cap_hits, [&](std::size_t j, double s) {
        states[2 * j] = s;
        states[2 * j + 1] = x[j];
      });
  for (std::size_t j = 0; j <= n; ++j)
    if (!std::isfinite(states[2 * j])) throw SimulationError("non-finite stock", path_id, j);
}

PathEnsemble VolatilityModel::simulate(std::size_t n_paths, std::uint64_t seed, std::size_t* cap_hits) const {
  if (n_paths == 0) throw ConfigError("n_paths must be at least 1");
  const std::size_t n = grid().n_steps();
  PathEnsemble e;
  e.grid = grid();
  e.dim_state = 2;
  e.dim_noise = 2;
  e.seed = seed;
  e.path_count = n_paths;
  e.noise.resize(n_paths * n * 2);
  e.states.resize(n_paths * (n + 1) * 2);
  const NormalStream stream(seed);
  std::vector<std::size_t> hits(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      auto noise = std::span<double>(e.noise).subspan(p * n * 2, n * 2);
      fill_increments(stream, e.grid, 2, p, 0, n, noise);
      run_path(noise, std::span<double>(e.states).subspan(p * (n + 1) * 2, (n + 1) * 2), p, nullptr, &hits[p]);
    }
  });
  if (cap_hits) {
    *cap_hits = 0;
    for (auto h : hits) *cap_hits += h;
  }
  return e;
}

std::vector<double> VolatilityModel::theta_row(const PathEnsemble& ensemble, std::size_t path, std::size_t i) const {
  const std::size_t n = grid().n_steps();
  if (!(ensemble.grid == grid()) || ensemble.dim_noise != 2) throw ConfigError("ensemble does not match the model");
  if (path >= ensemble.path_count || i > n) throw DomainError("theta row index out of range");
  std::vector<double> row;
  const VolterraStepper::RowCallback grab = [&](std::size_t k, std::span<const double> r) {
    if (k == i) row.assign(r.begin(), r.end());
  };
  VolterraStepper::State s = stepper_.initial_state();
  stepper_.advance(s, ensemble.path_noise(path), n, path, &grab);
  return row;
}

void VolatilityModel::continue_driver(std::size_t i, std::span<const double> theta_row,
                                      std::span<const double> noise, std::size_t path_id,
                                      std::span<double> driver_out) const {
  const std::size_t n = grid().n_steps();
  if (theta_row.size() != n + 1 - i || driver_out.size() < n + 1 - i) throw ConfigError("theta row size mismatch");
  VolterraStepper::State s = stepper_.initial_state();
  if (stepper_.flat()) {
    s.acc[0] = theta_row[0];
  } else {
    std::copy(theta_row.begin(), theta_row.end(), s.acc.begin() + static_cast<std::ptrdiff_t>(i));
  }
  s.step = i;
  stepper_.advance(s, noise, n, path_id);
  for (std::size_t j = i; j <= n; ++j) driver_out[j - i] = s.states[j];
}

PathEnsemble simulate_heston(const RoughHestonParams& p, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed) {
  return VolatilityModel::heston(p, grid).simulate(n_paths, seed);
}

PathEnsemble simulate_bergomi(const RoughBergomiParams& p, const TimeGrid& grid, std::size_t n_paths,
                              std::uint64_t seed, std::size_t* cap_hits) {
  return VolatilityModel::bergomi(p, grid).simulate(n_paths, seed, cap_hits);
}

ForwardVarianceCurve heston_theta(const PathEnsemble& ensemble, const RoughHestonParams& p, std::size_t path,
                                  std::size_t i) {
  const auto model = VolatilityModel::heston(p, ensemble.grid);
  ForwardVarianceCurve c;
  c.anchor_time = ensemble.grid.time(i);
  c.theta_values = model.theta_row(ensemble, path, i);
  for (std::size_t j = i; j <= ensemble.grid.n_steps(); ++j) c.horizons.push_back(ensemble.grid.time(j));
  c.hat_values = c.horizons.size() > 1 ? theta_to_hat(c.horizons, c.theta_values, p.relaxation()) : c.theta_values;
  return c;
}

double bergomi_forward_variance(const RoughBergomiParams& p, double t, double s, double theta_s) {
  const double h2 = 2.0 * p.hurst;
  const double lam2 = p.vol_of_vol * p.vol_of_vol;
  return p.v0 * std::exp(theta_s + 0.5 * lam2 * (std::pow(s - t, h2) - std::pow(s, h2)));
}

ForwardVarianceCurve bergomi_curve(const VolatilityModel& model, std::span<const double> theta_row, std::size_t i) {
  if (!model.bergomi_params()) throw ConfigError("bergomi_curve needs a rough Bergomi model");
  const auto& p = *model.bergomi_params();
  ForwardVarianceCurve c;
  c.anchor_time = model.grid().time(i);
  c.theta_values.assign(theta_row.begin(), theta_row.end());
  for (std::size_t j = 0; j < theta_row.size(); ++j) {
    const double s = model.grid().time(i + j);
    c.horizons.push_back(s);
    c.hat_values.push_back(bergomi_forward_variance(p, c.anchor_time, s, theta_row[j]));
  }
  return c;
}

double black_scholes_call(double spot, double strike, double total_variance) {
  if (total_variance <= 0.0) return std::max(spot - strike, 0.0);
  if (strike <= 0.0) return spot - strike;
  const double sd = std::sqrt(total_variance);
  const double d1 = (std::log(spot / strike) + 0.5 * total_variance) / sd;
  return spot * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double black_scholes_put(double spot, double strike, double total_variance) {
  return black_scholes_call(spot, strike, total_variance) - spot + strike;
}

double lognormal_expectation(const Payoff& g, double spot, double total_variance) {
  if (g.kind() == PayoffKind::Call) return black_scholes_call(spot, g.strike(), total_variance);
  if (g.kind() == PayoffKind::Put) return black_scholes_put(spot, g.strike(), total_variance);
  if (g.kind() == PayoffKind::Identity) return spot;
  if (total_variance <= 0.0) return g(spot);
  const double sd = std::sqrt(total_variance);
  std::vector<double> kinks;
  for (const auto& k : g.kinks())
    if (k.location > 0.0) kinks.push_back((std::log(k.location / spot) + 0.5 * total_variance) / sd);
  return gaussian_expectation([&](double z) { return g(spot * std::exp(sd * z - 0.5 * total_variance)); }, 0.0, 1.0,
                              kinks);
}

namespace {

// Value of the claim on one nested path for several spots. `driver` holds x_j
// for j = i..N.
class NestedPath {
 public:
  NestedPath(const VolatilityModel& m, std::size_t i, std::span<const double> driver, std::span<const double> noise)
      : m_(m), i_(i), driver_(driver), noise_(noise) {}

  double value(const Claim& claim, PricingMethod method, double spot) const {
    const TimeGrid& g = m_.grid();
    const std::size_t n = g.n_steps();
    const double dt = g.dt();
    if (method == PricingMethod::Conditional) {
      double iv = 0.0, iw = 0.0;
      for (std::size_t j = i_; j < n; ++j) {
        const double v = m_.variance(driver_[j - i_], j);
        iv += v * dt;
        iw += std::sqrt(v) * noise_[2 * j + 1];
      }
      const double rho = m_.correlation();
      const double eff = spot * std::exp(rho * iw - 0.5 * rho * rho * iv);
      return lognormal_expectation(claim.terminal, eff, (1.0 - rho * rho) * iv);
    }
    double running = 0.0, prev_f = 0.0;
    const bool has_f = !claim.running.is_zero();
    const double st = step_stock(
        m_, i_, spot, [&](std::size_t j) { return driver_[j - i_]; }, noise_, nullptr, [&](std::size_t j, double s) {
          if (!has_f) return;
          const double f = claim.running(g.time(j), s);
          if (j > i_) running += 0.5 * (prev_f + f) * dt;
          prev_f = f;
        });
    return claim.terminal(st) + running;
  }

 private:
  const VolatilityModel& m_;
  std::size_t i_;
  std::span<const double> driver_;
  std::span<const double> noise_;
};

void check_pricing(const VolatilityModel& model, const Claim& claim, std::size_t i, double spot,
                   std::span<const double> theta_row, const PricingConfig& cfg) {
  const std::size_t n = model.grid().n_steps();
  if (i > n) throw DomainError("pricing date beyond the grid");
  if (theta_row.size() != n + 1 - i) throw ConfigError("theta row must cover steps i..N");
  if (!(spot > 0.0)) throw DomainError("spot must be positive");
  if (cfg.n_paths == 0) throw ConfigError("pricing needs at least one path");
  if (cfg.method == PricingMethod::Conditional && !claim.running.is_zero())
    throw ConfigError("conditional pricing handles terminal claims only");
}

}  // namespace

PriceEstimate price_claim(const VolatilityModel& model, const Claim& claim, std::size_t i, double spot,
                          std::span<const double> theta_row, const PricingConfig& cfg) {
  check_pricing(model, claim, i, spot, theta_row, cfg);
  const std::size_t n = model.grid().n_steps();
  std::vector<double> values(cfg.n_paths);
  const NormalStream stream(cfg.seed);
  parallel_for(cfg.n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> noise(2 * n, 0.0), driver(n + 1 - i);
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(stream, model.grid(), 2, p, i, n, noise);
      model.continue_driver(i, theta_row, noise, p, driver);
      values[p] = NestedPath(model, i, driver, noise).value(claim, cfg.method, spot);
    }
  });
  const auto est = estimate_mean(values);
  PriceEstimate out{est.mean, est.std_error, cfg.n_paths, false};
  out.flagged = cfg.max_std_error > 0.0 && est.std_error > cfg.max_std_error;
  return out;
}

HedgeRatios hedge_ratios(const VolatilityModel& model, const Claim& claim, std::size_t i, double spot,
                         std::span<const double> theta_row, const HedgeRatioConfig& cfg) {
  check_pricing(model, claim, i, spot, theta_row, cfg.pricing);
  const TimeGrid& g = model.grid();
  const std::size_t n = g.n_steps();
  if (i >= n) throw DomainError("hedge ratios need a date before the horizon");
  const double t = g.time(i);
  const double H = model.hurst();
  const double hs = cfg.stock_bump * model.s0();
  const double hc = cfg.curve_bump * (model.kind() == VolModelKind::RoughHeston ? model.v0() : 1.0);
  if (!(hs > 0.0) || !(hc > 0.0)) throw ConfigError("hedge bumps must be positive");

  // a^t is unbounded at s = t, so the bump starts one step later.
  std::vector<double> bumped(theta_row.begin(), theta_row.end());
  for (std::size_t j = i + 1; j <= n; ++j) bumped[j - i] += hc * std::pow(g.time(j) - t, H - 0.5);

  const std::size_t m = cfg.pricing.n_paths;
  std::vector<double> base(m), stock(m), curve(m);
  const NormalStream stream(cfg.pricing.seed);
  std::vector<double> noise(2 * n, 0.0), x0(n + 1 - i), x1(n + 1 - i);
  for (std::size_t p = 0; p < m; ++p) {
    fill_increments(stream, g, 2, p, i, n, noise);
    model.continue_driver(i, theta_row, noise, p, x0);
    model.continue_driver(i, bumped, noise, p, x1);
    const NestedPath path0(model, i, x0, noise), path1(model, i, x1, noise);
    base[p] = path0.value(claim, cfg.pricing.method, spot);
    stock[p] = (path0.value(claim, cfg.pricing.method, spot + hs) -
                path0.value(claim, cfg.pricing.method, spot - hs)) /
               (2.0 * hs);
    curve[p] = (path1.value(claim, cfg.pricing.method, spot) - base[p]) / hc;
  }
  const auto e0 = estimate_mean(base), es = estimate_mean(stock), ec = estimate_mean(curve);
  HedgeRatios r;
  r.price = e0.mean;
  r.delta_stock = es.mean;
  r.se_stock = es.std_error;
  r.pairing = ec.mean;
  r.se_pairing = ec.std_error;
  r.delta_fv = std::pow(g.horizon() - t, 0.5 - H) * ec.mean;
  if (model.kind() == VolModelKind::RoughBergomi)
    r.delta_fv /= bergomi_forward_variance(*model.bergomi_params(), t, g.horizon(), theta_row.back());
  auto noisy = [](const MeanEstimate& e) { return e.std_error > 1e-14 && e.std_error > 0.5 * std::abs(e.mean); };
  r.unstable = noisy(es) || noisy(ec);
  return r;
}

}  // namespace volterra
