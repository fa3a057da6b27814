#include "volterra/bsde.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

void BSDEProblem::validate(const PathView& sample_path) const {
  if (!terminal) throw ConfigError("BSDE problem needs a terminal functional");
  if (!(lipschitz_bound >= 0.0) || !std::isfinite(lipschitz_bound))
    throw ConfigError("BSDE Lipschitz bound must be finite and non-negative");
  coeff.validate();
  if (!driver) return;
  const std::size_t k = coeff.dim_noise;
  const std::vector<double> ys{-2.0, -0.5, 0.0, 0.7, 3.0};
  std::vector<double> z1(k), z2(k);
  const std::size_t last = sample_path.step();
  for (std::size_t step : {std::size_t{0}, last / 2, last}) {
    const PathView view(sample_path.states_span(), sample_path.dim(), step, sample_path.grid());
    const double t = view.time();
    for (std::size_t a = 0; a < ys.size(); ++a) {
      for (std::size_t b = a + 1; b < ys.size(); ++b) {
        std::fill(z1.begin(), z1.end(), ys[b] * 0.5);
        std::fill(z2.begin(), z2.end(), ys[a] * 1.5);
        const double df = std::abs(driver(t, view, ys[a], z1) - driver(t, view, ys[b], z2));
        double dist = std::abs(ys[a] - ys[b]);
        for (std::size_t m = 0; m < k; ++m) dist += std::abs(z1[m] - z2[m]);
        if (!std::isfinite(df)) throw ConfigError("BSDE driver returned a non-finite value");
        if (df > lipschitz_bound * dist * (1.0 + 1e-9) + 1e-12)
          throw ConfigError("BSDE driver exceeds its declared Lipschitz bound");
      }
    }
  }
}

void FeatureSpec::validate() const {
  if (degree < 1 || degree > 4) throw ConfigError("feature degree must be between 1 and 4");
  for (double f : theta_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("theta feature fractions must lie in (0, 1]");
}

std::string FeatureSpec::describe(std::size_t dim_state) const {
  std::ostringstream os;
  os << "polynomials of degree <= " << degree << " in (";
  for (std::size_t c = 0; c < dim_state; ++c) os << (c ? ", " : "") << "X" << c;
  for (double f : theta_fractions) os << ", Theta^t_{t+" << f << "(T-t)} - X0";
  os << "), standardized per step";
  return os.str();
}

namespace {

using Exponents = std::vector<int>;

std::vector<Exponents> monomials(std::size_t n_vars, int degree) {
  std::vector<Exponents> out{Exponents(n_vars, 0)};
  // Build degree by degree with non-decreasing variable index to avoid repeats.
  std::vector<std::pair<Exponents, std::size_t>> frontier{{Exponents(n_vars, 0), 0}};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::pair<Exponents, std::size_t>> next;
    for (const auto& [e, start] : frontier) {
      for (std::size_t v = start; v < n_vars; ++v) {
        Exponents f = e;
        ++f[v];
        out.push_back(f);
        next.emplace_back(std::move(f), v);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

/// Raw features of every path at every step, computed from the Theta rows.
struct FeatureCube {
  std::size_t n_raw = 0;
  std::size_t n_steps = 0;
  std::vector<double> values;  // path-major: (p * N + i) * n_raw + r

  double at(std::size_t p, std::size_t i, std::size_t r) const { return values[(p * n_steps + i) * n_raw + r]; }
};

FeatureCube raw_features(const CoefficientSpec& coeff, const PathEnsemble& ens, const FeatureSpec& spec) {
  const TimeGrid& grid = ens.grid;
  const std::size_t n = grid.n_steps();
  const std::size_t d = ens.dim_state;
  FeatureCube cube;
  cube.n_raw = d + spec.theta_fractions.size();
  cube.n_steps = n;
  cube.values.assign(ens.path_count * n * cube.n_raw, 0.0);
  const VolterraStepper stepper(coeff, grid);
  parallel_for(ens.path_count, [&](std::size_t begin, std::size_t end) {
    std::vector<double> states((n + 1) * d);
    for (std::size_t p = begin; p < end; ++p) {
      VolterraStepper::RowCallback cb = [&](std::size_t i, std::span<const double> row) {
        if (i >= n) return;
        double* out = &cube.values[(p * n + i) * cube.n_raw];
        for (std::size_t c = 0; c < d; ++c) out[c] = row[c];
        const double t = grid.time(i);
        for (std::size_t f = 0; f < spec.theta_fractions.size(); ++f) {
          const double s = t + spec.theta_fractions[f] * (grid.horizon() - t);
          const std::size_t j = std::max(i, grid.nearest_index(s));
          out[d + f] = row[(j - i) * d] - row[0];
        }
      };
      stepper.run(ens.path_noise(p), states, p, &cb);
    }
  });
  return cube;
}

/// Raw features explaining all but this fraction of a candidate's variance are dropped.
constexpr double kMinResidualVariance = 1e-3;

/// Least-squares projection onto the standardized polynomial basis of one step.
class StepRegression {
 public:
  StepRegression(const FeatureCube& cube, std::size_t step, std::size_t n_paths, int degree, double ridge,
                 double max_condition)
      : n_paths_(n_paths) {
    // Standardize raw features; drop constant and duplicate ones.
    std::vector<double> mean(cube.n_raw, 0.0), sd(cube.n_raw, 0.0);
    for (std::size_t r = 0; r < cube.n_raw; ++r) {
      double s = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) s += cube.at(p, step, r);
      mean[r] = s / static_cast<double>(n_paths);
      double ss = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) {
        const double x = cube.at(p, step, r) - mean[r];
        ss += x * x;
      }
      sd[r] = std::sqrt(ss / static_cast<double>(n_paths));
    }
    // A feature is kept only if it is not (nearly) an affine combination of
    // the features already kept: early steps of a Gaussian Volterra process
    // carry fewer independent increments than there are raw features.
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < cube.n_raw; ++r) {
      if (!(sd[r] > 1e-12 * (1.0 + std::abs(mean[r])))) continue;
      const auto k = static_cast<Eigen::Index>(keep.size());
      Eigen::MatrixXd corr(k, k);
      Eigen::VectorXd cross(k);
      auto correlation = [&](std::size_t a, std::size_t b) {
        double c = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p)
          c += (cube.at(p, step, a) - mean[a]) * (cube.at(p, step, b) - mean[b]);
        return c / (static_cast<double>(n_paths) * sd[a] * sd[b]);
      };
      for (Eigen::Index a = 0; a < k; ++a) {
        cross(a) = correlation(r, keep[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b <= a; ++b)
          corr(a, b) = corr(b, a) = correlation(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
      }
      const double explained = k > 0 ? cross.dot(corr.ldlt().solve(cross)) : 0.0;
      if (1.0 - explained > kMinResidualVariance) keep.push_back(r);
    }
    const auto terms = monomials(keep.size(), degree);
    design_.resize(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t k = 0; k < terms.size(); ++k) {
        double v = 1.0;
        for (std::size_t a = 0; a < keep.size(); ++a) {
          const double z = (cube.at(p, step, keep[a]) - mean[keep[a]]) / sd[keep[a]];
          for (int e = 0; e < terms[k][a]; ++e) v *= z;
        }
        design_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = v;
      }
    }
    Eigen::MatrixXd normal = design_.transpose() * design_;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition_ <= max_condition))
      throw SolverError("rank-deficient regression at step " + std::to_string(step), step);
    normal.diagonal().array() += ridge * normal.trace();
    solver_.compute(normal);
    if (solver_.info() != Eigen::Success)
      throw SolverError("regression factorization failed at step " + std::to_string(step), step);
  }

  double condition() const noexcept { return condition_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(design_.cols()); }

  /// Fitted values of the projection of `target` (one value per path).
  std::vector<double> project(std::span<const double> target) const {
    const Eigen::Map<const Eigen::VectorXd> y(target.data(), static_cast<Eigen::Index>(target.size()));
    const Eigen::VectorXd beta = solver_.solve(design_.transpose() * y);
    const Eigen::VectorXd fit = design_ * beta;
    return std::vector<double>(fit.data(), fit.data() + fit.size());
  }

 private:
  std::size_t n_paths_;
  Eigen::MatrixXd design_;
  Eigen::LDLT<Eigen::MatrixXd> solver_;
  double condition_ = 1.0;
};

double rms_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

BSDESolution solve_lsmc(const BSDEProblem& problem, const PathEnsemble& ensemble, const FeatureSpec& features,
                        const LsmcOptions& opts) {
  features.validate();
  if (ensemble.path_count < 2) throw ConfigError("BSDE regression needs at least two paths");
  if (ensemble.dim_state != problem.coeff.dim_state || ensemble.dim_noise != problem.coeff.dim_noise)
    throw ConfigError("ensemble dimensions do not match the BSDE coefficients");
  if (opts.picard_iterations < 1) throw ConfigError("at least one Picard iteration is required");
  const TimeGrid& grid = ensemble.grid;
  const std::size_t n = grid.n_steps();
  const std::size_t k = ensemble.dim_noise;
  const std::size_t np = ensemble.path_count;
  const double dt = grid.dt();
  problem.validate(PathView(ensemble.path_states(0), ensemble.dim_state, n, grid));

  BSDESolution sol;
  sol.path_count = np;
  sol.n_steps = n;
  sol.dim_noise = k;
  sol.basis = features.describe(ensemble.dim_state);
  sol.y_values.assign(np * (n + 1), 0.0);
  sol.z_values.assign(np * n * k, 0.0);
  sol.condition_numbers.assign(n, 0.0);
  sol.active_features.assign(n, 0);

  const FeatureCube cube = raw_features(problem.coeff, ensemble, features);

  std::vector<double> next(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double g = problem.terminal(PathView(ensemble.path_states(p), ensemble.dim_state, n, grid));
    if (!std::isfinite(g)) throw SolverError("terminal value is not finite", n);
    sol.y_values[p * (n + 1) + n] = g;
    next[p] = g;
  }

  std::vector<double> target(np), cur(np), prev(np), zrow(k);
  std::vector<double> last_target(np);
  // Terminal value plus the accumulated driver along each path.
  std::vector<double> pathwise(next);
  for (std::size_t step = n; step-- > 0;) {
    const double t = grid.time(step);
    const StepRegression reg(cube, step, np, features.degree, opts.ridge, opts.max_condition);
    sol.condition_numbers[step] = reg.condition();
    sol.active_features[step] = reg.size();

    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t p = 0; p < np; ++p) target[p] = next[p] * ensemble.increment(p, step, m) / dt;
      const auto z = reg.project(target);
      for (std::size_t p = 0; p < np; ++p) sol.z_values[(p * n + step) * k + m] = z[p];
    }

    const auto cond_mean = reg.project(next);
    cur = cond_mean;
    double prev_update = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.picard_iterations; ++it) {
      prev = cur;
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t m = 0; m < k; ++m) zrow[m] = sol.z_values[(p * n + step) * k + m];
        const PathView past(ensemble.path_states(p), ensemble.dim_state, step, grid);
        const double f = problem.eval_driver(t, past, prev[p], zrow);
        cur[p] = cond_mean[p] + f * dt;
        last_target[p] = next[p] + f * dt;
      }
      const double update = rms_diff(cur, prev);
      if (it > 0 && update > prev_update && update > 1e-14)
        sol.warnings.push_back("Picard update grew at step " + std::to_string(step));
      prev_update = update;
    }
    for (std::size_t p = 0; p < np; ++p) {
      pathwise[p] += last_target[p] - next[p];
      if (!std::isfinite(cur[p])) throw SolverError("non-finite BSDE value", step);
      sol.y_values[p * (n + 1) + step] = cur[p];
    }
    next = cur;
  }
  // At t_0 every feature is deterministic, so Y_0 is the sample mean of the
  // step-0 targets. Their spread hides the Monte Carlo error of the
  // regressions, so the standard error comes from the pathwise values.
  sol.y0 = estimate_mean(last_target);
  const auto spread = estimate_mean(pathwise);
  sol.y0.std_error = spread.std_error;
  sol.y0.std_dev = spread.std_dev;
  return sol;
}

FeynmanKacReport feynman_kac_check(const BSDEProblem& problem, const Functional& u, const PathEnsemble& ensemble,
                                   const FeynmanKacOptions& opts) {
  if (!problem.terminal) throw ConfigError("BSDE problem needs a terminal functional");
  const TimeGrid& grid = ensemble.grid;
  const std::size_t n = grid.n_steps();
  const std::size_t k = ensemble.dim_noise;
  const double dt = grid.dt();
  const std::size_t np =
      opts.max_paths == 0 ? ensemble.path_count : std::min(opts.max_paths, ensemble.path_count);
  if (np < 2) throw ConfigError("Feynman-Kac check needs at least two paths");

  std::vector<double> residuals(np);
  parallel_for(np, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const ThetaField field = theta_field(ensemble, problem.coeff, p);
      const auto states = ensemble.path_states(p);
      double y0 = 0.0, drift = 0.0, mart = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = grid.time(i);
        const Path omega = concat(field, i).to_path();
        const double y = u(t, omega);
        if (i == 0) y0 = y;
        const PathView past(states, ensemble.dim_state, i, grid);
        const auto terms = generator_terms(u, t, omega, problem.coeff, past, opts.ito, true);
        drift += problem.eval_driver(t, past, y, terms.diffusion) * dt;
        for (std::size_t m = 0; m < k; ++m) mart += terms.diffusion[m] * ensemble.increment(p, i, m);
      }
      const double g = problem.terminal(PathView(states, ensemble.dim_state, n, grid));
      residuals[p] = y0 - g - drift + mart;
    }
  });

  FeynmanKacReport rep;
  rep.residual = estimate_mean(residuals);
  double ss = 0.0;
  for (double r : residuals) ss += r * r;
  rep.rms = std::sqrt(ss / static_cast<double>(np));

  if (n >= 2) {
    rep.ppde_residuals.resize(opts.ppde_samples);
    parallel_for(opts.ppde_samples, [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        const std::size_t p = s % np;
        const std::size_t i = 1 + (s * 7919) % (n - 1);
        const double t = grid.time(i);
        const ThetaField field = theta_field(ensemble, problem.coeff, p);
        const Path omega = concat(field, i).to_path();
        const PathView past(ensemble.path_states(p), ensemble.dim_state, i, grid);
        const auto terms = generator_terms(u, t, omega, problem.coeff, past, opts.ito);
        rep.ppde_residuals[s] = terms.time + terms.drift + 0.5 * terms.second +
                                problem.eval_driver(t, past, u(t, omega), terms.diffusion);
      }
    });
    for (double r : rep.ppde_residuals) rep.max_ppde_residual = std::max(rep.max_ppde_residual, std::abs(r));
  }
  return rep;
}

}  // namespace volterra
