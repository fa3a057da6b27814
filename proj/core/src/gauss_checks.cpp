#include "volterra/gauss_checks.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rng.hpp"
#include "volterra/simulate.hpp"

namespace volterra {
namespace {

double trapezoid_running(const RunningCost& f, const TimeGrid& grid, std::span<const double> states) {
  if (f.is_zero()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.n_steps(); ++i)
    sum += 0.5 * grid.dt() * (f(grid.time(i), states[i]) + f(grid.time(i + 1), states[i + 1]));
  return sum;
}

ConcatPath make_concat(const TimeGrid& grid, std::size_t split, std::span<const double> states,
                       std::span<const double> row) {
  ConcatPath c;
  c.grid = grid;
  c.split = split;
  c.values.assign(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(split));
  c.values.insert(c.values.end(), row.begin(), row.end());
  return c;
}

}  // namespace

TowerReport tower_check(const GaussFunctional& fnl, const TimeGrid& grid, const TowerOptions& opts) {
  const LinearProblem& lp = fnl.problem();
  if (std::abs(grid.horizon() - lp.horizon) > 1e-12 * lp.horizon)
    throw ConfigError("tower check grid must end at the problem horizon");
  if (opts.outer_paths == 0 || opts.inner_paths < 2) throw ConfigError("tower check needs paths");
  const CoefficientSpec coeff = CoefficientSpec::gaussian(lp.kernel);
  const PathEnsemble outer = simulate_ensemble(coeff, grid, opts.outer_paths, opts.seed);
  const std::size_t n = grid.n_steps();

  TowerReport rep;
  for (std::size_t p = 0; p < opts.outer_paths; ++p) {
    const ThetaField field = theta_field(outer, coeff, p);
    for (double frac : opts.time_fractions) {
      if (!(frac >= 0.0 && frac < 1.0)) throw ConfigError("tower check times must lie in [0, 1)");
      const std::size_t step = std::min(grid.nearest_index(frac * grid.horizon()), n - 1);
      TowerPoint pt;
      pt.outer_path = p;
      pt.step = step;
      pt.time = grid.time(step);
      pt.functional = eval_u(fnl, concat(field, step));
      std::vector<double> xi(opts.inner_paths);
      for_each_continuation(coeff, grid, outer.path_noise(p), step, opts.inner_paths,
                            mix_seed(opts.seed, p + 1, step),
                            [&](std::size_t q, std::span<const double>, std::span<const double> states) {
                              xi[q] = lp.terminal(states[n]) + trapezoid_running(lp.running, grid, states);
                            });
      pt.nested = estimate_mean(xi);
      rep.max_abs_t_stat = std::max(rep.max_abs_t_stat, std::abs(pt.nested.t_stat(pt.functional)));
      rep.points.push_back(std::move(pt));
    }
  }
  return rep;
}

DriftReport martingale_drift(const GaussFunctional& fnl, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed, std::size_t from_step, std::size_t to_step) {
  const LinearProblem& lp = fnl.problem();
  if (!lp.running.is_zero()) throw ConfigError("the Markovian comparator needs f = 0");
  if (!(from_step < to_step && to_step <= grid.n_steps())) throw ConfigError("drift dates must satisfy a < b <= N");
  if (n_paths < 2) throw ConfigError("drift check needs at least two paths");
  const CoefficientSpec coeff = CoefficientSpec::gaussian(lp.kernel);
  const VolterraStepper stepper(coeff, grid);
  const NormalStream stream(seed);
  const std::size_t n = grid.n_steps();
  std::vector<double> du(n_paths), dtilde(n_paths);

  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> noise(n), states(n + 1), row_a, row_b;
    VolterraStepper::RowCallback cb = [&](std::size_t i, std::span<const double> row) {
      if (i == from_step) row_a.assign(row.begin(), row.end());
      if (i == to_step) row_b.assign(row.begin(), row.end());
    };
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(stream, grid, 1, p, 0, n, noise);
      stepper.run(noise, states, p, &cb);
      // The row at step N is only the terminal state.
      if (to_step == n) row_b.assign(1, states[n]);
      const double ua = eval_u(fnl, make_concat(grid, from_step, states, row_a));
      const double ub = eval_u(fnl, make_concat(grid, to_step, states, row_b));
      du[p] = ub - ua;
      dtilde[p] = eval_tilde_u(lp, grid.time(to_step), states[to_step]) -
                  eval_tilde_u(lp, grid.time(from_step), states[from_step]);
    }
  });
  DriftReport rep;
  rep.from_step = from_step;
  rep.to_step = to_step;
  rep.functional = estimate_mean(du);
  rep.markovian = estimate_mean(dtilde);
  return rep;
}

}  // namespace volterra
