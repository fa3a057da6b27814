#include "volterra/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "volterra/errors.hpp"
#include "volterra/simulate.hpp"

namespace volterra {
namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

MomentTable moment_scan(const CoefficientSpec& coeff, const std::vector<TimeGrid>& grids, std::size_t n_paths,
                        std::uint64_t seed, std::vector<int> powers) {
  if (grids.empty()) throw ConfigError("moment scan needs at least one grid");
  if (n_paths < 2) throw ConfigError("moment scan needs at least two paths");
  for (int p : powers)
    if (p < 1) throw ConfigError("moment powers must be positive");
  MomentTable table;
  table.powers = std::move(powers);
  for (const auto& grid : grids) {
    table.grid_sizes.push_back(grid.n_steps());
    std::vector<double> sups(n_paths);
    for_each_path(coeff, grid, n_paths, seed, [&](std::size_t p, std::span<const double>, std::span<const double> st) {
      sups[p] = max_abs(st);
    });
    std::vector<MeanEstimate> row;
    std::vector<double> samples(n_paths);
    for (int pw : table.powers) {
      for (std::size_t p = 0; p < n_paths; ++p) samples[p] = std::pow(sups[p], pw);
      row.push_back(estimate_mean(samples));
      if (!std::isfinite(row.back().mean) || !std::isfinite(row.back().std_error)) table.diverged = true;
    }
    table.estimates.push_back(std::move(row));
  }
  if (grids.size() >= 2) {
    std::vector<std::size_t> order(grids.size());
    for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return table.grid_sizes[a] < table.grid_sizes[b]; });
    const auto& big = table.estimates[order.back()];
    const auto& second = table.estimates[order[order.size() - 2]];
    for (std::size_t k = 0; k < table.powers.size(); ++k) {
      const double ref = std::abs(big[k].mean);
      if (!(std::abs(big[k].mean - second[k].mean) <= 0.1 * ref)) table.stable = false;
    }
  }
  if (table.diverged) table.stable = false;
  return table;
}

ScalingResult two_time_scaling(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t seed, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const std::size_t n = grid.n_steps();
  if (pairs.empty()) throw ConfigError("two-time scaling needs index pairs");
  if (n_paths < 2) throw ConfigError("two-time scaling needs at least two paths");
  std::set<std::size_t> needed;
  double gap_lo = INFINITY, gap_hi = 0.0;
  std::size_t nonzero = 0;
  for (auto [a, b] : pairs) {
    if (a > n || b > n) throw ConfigError("two-time index outside the grid");
    needed.insert(a);
    needed.insert(b);
    if (a == b) continue;
    ++nonzero;
    const double gap = std::abs(grid.time(b) - grid.time(a));
    gap_lo = std::min(gap_lo, gap);
    gap_hi = std::max(gap_hi, gap);
  }
  if (nonzero < 4) throw ConfigError("two-time scaling needs at least four distinct-time pairs");
  if (gap_hi < 10.0 * gap_lo * (1.0 - 1e-12)) throw ConfigError("two-time gaps must span at least one decade");

  const std::size_t d = coeff.dim_state;
  const std::vector<std::size_t> index(needed.begin(), needed.end());
  const VolterraStepper stepper(coeff, grid);
  std::vector<double> moments(pairs.size() * n_paths, 0.0);
  for_each_path(coeff, grid, n_paths, seed, [&](std::size_t p, std::span<const double> noise, std::span<const double>) {
    // Row i of the field is stored as d values per node j = i..N.
    std::vector<std::vector<double>> rows(index.size());
    std::vector<double> states((n + 1) * d);
    const VolterraStepper::RowCallback cb = [&](std::size_t i, std::span<const double> r) {
      const auto it = std::lower_bound(index.begin(), index.end(), i);
      if (it != index.end() && *it == i) rows[static_cast<std::size_t>(it - index.begin())].assign(r.begin(), r.end());
    };
    stepper.run(noise, states, p, &cb);
    auto row_of = [&](std::size_t i) -> const std::vector<double>& {
      const auto it = std::lower_bound(index.begin(), index.end(), i);
      return rows[static_cast<std::size_t>(it - index.begin())];
    };
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      auto [i, k] = pairs[q];
      if (i == k) continue;
      if (i > k) std::swap(i, k);
      // Before t_i both concatenations equal X; on [t_i, t_k) the second is
      // still X; from t_k on both are Theta rows.
      const auto& ri = row_of(i);
      const auto& rk = i == n ? ri : row_of(k);
      double sup = 0.0;
      for (std::size_t j = i; j <= n; ++j) {
        for (std::size_t c = 0; c < d; ++c) {
          const double a = ri[(j - i) * d + c];
          const double b = j < k ? states[j * d + c] : rk[(j - k) * d + c];
          sup = std::max(sup, std::abs(a - b));
        }
      }
      moments[q * n_paths + p] = std::pow(sup, 4);
    }
  });

  ScalingResult out;
  std::vector<double> xs, ys;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    out.moments.push_back(estimate_mean(std::span<const double>(moments).subspan(q * n_paths, n_paths)));
    const auto [a, b] = pairs[q];
    if (a == b) continue;
    if (!(out.moments.back().mean > 0.0)) throw NumericalError("two-time moment is not positive");
    xs.push_back(std::log(std::abs(grid.time(b) - grid.time(a))));
    ys.push_back(std::log(out.moments.back().mean));
  }
  out.fit = fit_line(xs, ys);
  return out;
}

ScalingResult freeze_rate(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, const std::vector<int>& levels) {
  const std::size_t n = grid.n_steps();
  if (levels.size() < 4) throw ConfigError("freeze rate needs at least four levels");
  if (n_paths < 2) throw ConfigError("freeze rate needs at least two paths");
  std::set<int> distinct(levels.begin(), levels.end());
  if (distinct.size() != levels.size()) throw ConfigError("freeze levels must be distinct");
  std::vector<std::size_t> widths;
  for (int level : levels) {
    if (level < 0 || level > 62) throw ConfigError("freeze level out of range");
    const std::size_t blocks = std::size_t{1} << level;
    if (n % blocks != 0) throw ConfigError("2^level must divide the number of steps");
    widths.push_back(n / blocks);
  }
  const std::size_t d = coeff.dim_state;
  const VolterraStepper stepper(coeff, grid);
  std::vector<double> moments(levels.size() * n_paths, 0.0);
  for_each_path(coeff, grid, n_paths, seed, [&](std::size_t p, std::span<const double> noise, std::span<const double>) {
    std::vector<std::vector<double>> frozen(levels.size(), std::vector<double>((n + 1) * d));
    std::vector<double> states((n + 1) * d);
    const VolterraStepper::RowCallback cb = [&](std::size_t i, std::span<const double> r) {
      if (i == n) return;
      for (std::size_t l = 0; l < levels.size(); ++l) {
        const std::size_t w = widths[l];
        if (i % w != 0) continue;
        for (std::size_t j = i; j < i + w; ++j)
          for (std::size_t c = 0; c < d; ++c) frozen[l][j * d + c] = r[(j - i) * d + c];
      }
    };
    stepper.run(noise, states, p, &cb);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      double sup = 0.0;
      // X^n_T = X_T, so the terminal node contributes nothing.
      for (std::size_t j = 0; j < n * d; ++j) sup = std::max(sup, std::abs(states[j] - frozen[l][j]));
      moments[l * n_paths + p] = std::pow(sup, 8);
    }
  });

  ScalingResult out;
  std::vector<double> xs, ys;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    out.moments.push_back(estimate_mean(std::span<const double>(moments).subspan(l * n_paths, n_paths)));
    if (!(out.moments.back().mean > 0.0)) continue;
    xs.push_back(static_cast<double>(levels[l]));
    ys.push_back(std::log2(out.moments.back().mean));
  }
  if (xs.size() < 4) throw NumericalError("freeze rate has fewer than four non-zero moments to fit");
  out.fit = fit_line(xs, ys);
  return out;
}

CovarianceReport covariance_check(const KernelSpec& kernel, const TimeGrid& grid, std::size_t n_paths,
                                  std::uint64_t seed) {
  if (n_paths < 2) throw ConfigError("covariance check needs at least two paths");
  const CoefficientSpec coeff = CoefficientSpec::gaussian(kernel);
  std::vector<std::size_t> idx;
  for (int k = 1; k <= 5; ++k) idx.push_back(grid.nearest_index(grid.horizon() * k / 5.0));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (idx.front() == 0) throw ConfigError("covariance submesh needs at least five steps");
  const std::size_t m = idx.size();
  std::vector<double> products(m * m * n_paths);
  for_each_path(coeff, grid, n_paths, seed, [&](std::size_t p, std::span<const double>, std::span<const double> st) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) products[(a * m + b) * n_paths + p] = st[idx[a]] * st[idx[b]];
  });
  CovarianceReport rep;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      CovarianceEntry e;
      e.s = grid.time(idx[a]);
      e.t = grid.time(idx[b]);
      e.estimate = estimate_mean(std::span<const double>(products).subspan((a * m + b) * n_paths, n_paths));
      e.oracle = kernel.product_integral(e.s, e.t);
      rep.max_abs_error = std::max(rep.max_abs_error, std::abs(e.estimate.mean - e.oracle));
      rep.max_abs_t_stat = std::max(rep.max_abs_t_stat, std::abs(e.estimate.t_stat(e.oracle)));
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace volterra
