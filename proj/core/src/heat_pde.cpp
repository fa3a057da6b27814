#include "volterra/heat_pde.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

void HeatGridConfig::validate() const {
  if (!(x_max > x_min)) throw ConfigError("heat grid needs x_max > x_min");
  if (n_space < 3 || n_tau < 1) throw ConfigError("heat grid is too small");
}

HeatSolution::HeatSolution(std::vector<double> taus, std::vector<double> xs, std::vector<double> values)
    : taus_(std::move(taus)), xs_(std::move(xs)), values_(std::move(values)) {
  if (values_.size() != taus_.size() * xs_.size()) throw ConfigError("heat table has inconsistent sizes");
}

double HeatSolution::value(double tau, double x) const {
  if (tau < taus_.front() || tau > taus_.back() * (1 + 1e-12) || x < xs_.front() || x > xs_.back())
    throw DomainError("heat table evaluated outside its grid");
  auto locate = [](const std::vector<double>& grid, double v, double& w) {
    if (grid.size() == 1) {
      w = 0.0;
      return std::size_t{0};
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), v);
    auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - grid.begin() - 1, 0));
    i = std::min(i, grid.size() - 2);
    w = std::clamp((v - grid[i]) / (grid[i + 1] - grid[i]), 0.0, 1.0);
    return i;
  };
  double wt = 0.0, wx = 0.0;
  const std::size_t k = locate(taus_, tau, wt);
  const std::size_t j = locate(xs_, x, wx);
  const std::size_t k1 = std::min(k + 1, taus_.size() - 1);
  const double lo = (1 - wx) * at(k, j) + wx * at(k, j + 1);
  const double hi = (1 - wx) * at(k1, j) + wx * at(k1, j + 1);
  return (1 - wt) * lo + wt * hi;
}

namespace {

// Solves the tridiagonal system a_i y_{i-1} + b_i y_i + c_i y_{i+1} = d_i in place.
void thomas(double a, double b, double c, std::vector<double>& d, std::vector<double>& scratch) {
  const std::size_t n = d.size();
  scratch.resize(n);
  scratch[0] = c / b;
  d[0] /= b;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = b - a * scratch[i - 1];
    scratch[i] = c / m;
    d[i] = (d[i] - a * d[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= scratch[i] * d[i + 1];
}

}  // namespace

HeatSolution solve_heat(const std::function<double(double)>& initial,
                        const std::function<double(double, double)>& boundary, double tau_max,
                        const HeatGridConfig& cfg) {
  cfg.validate();
  if (!(tau_max >= 0.0)) throw ConfigError("heat solve needs tau_max >= 0");
  const std::size_t nx = cfg.n_space;
  const std::size_t nt = tau_max > 0.0 ? cfg.n_tau : 0;
  const double dx = (cfg.x_max - cfg.x_min) / static_cast<double>(nx - 1);
  std::vector<double> xs(nx), taus(nt + 1);
  for (std::size_t j = 0; j < nx; ++j) xs[j] = cfg.x_min + dx * static_cast<double>(j);
  for (std::size_t k = 0; k <= nt; ++k) taus[k] = nt == 0 ? 0.0 : tau_max * static_cast<double>(k) / nt;

  std::vector<double> values((nt + 1) * nx);
  for (std::size_t j = 0; j < nx; ++j) values[j] = initial(xs[j]);

  std::vector<double> cur(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(nx));
  std::vector<double> rhs(nx - 2), scratch;
  const double dtau = nt == 0 ? 0.0 : tau_max / static_cast<double>(nt);

  // One step of the theta-scheme from tau0 to tau0 + h.
  auto step = [&](double tau0, double h, double theta) {
    const double r = 0.5 * h / (dx * dx);
    const double left = boundary(tau0 + h, xs.front());
    const double right = boundary(tau0 + h, xs.back());
    for (std::size_t i = 1; i + 1 < nx; ++i)
      rhs[i - 1] = cur[i] + (1 - theta) * r * (cur[i - 1] - 2 * cur[i] + cur[i + 1]);
    rhs.front() += theta * r * left;
    rhs.back() += theta * r * right;
    thomas(-theta * r, 1 + 2 * theta * r, -theta * r, rhs, scratch);
    cur.front() = left;
    cur.back() = right;
    std::copy(rhs.begin(), rhs.end(), cur.begin() + 1);
  };

  for (std::size_t k = 1; k <= nt; ++k) {
    const double tau0 = taus[k - 1];
    if (k == 1 && cfg.smoothing_steps > 0) {
      const double h = dtau / static_cast<double>(cfg.smoothing_steps);
      for (std::size_t s = 0; s < cfg.smoothing_steps; ++s) step(tau0 + h * static_cast<double>(s), h, 1.0);
    } else {
      step(tau0, dtau, 0.5);
    }
    for (std::size_t j = 0; j < nx; ++j) {
      if (!std::isfinite(cur[j])) throw SolverError("heat solve produced a non-finite value", k);
      values[k * nx + j] = cur[j];
    }
  }
  return HeatSolution(std::move(taus), std::move(xs), std::move(values));
}

}  // namespace volterra
