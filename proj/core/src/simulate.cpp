#include "volterra/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

std::span<const double> PathEnsemble::path_noise(std::size_t p) const {
  const std::size_t len = grid.n_steps() * dim_noise;
  return std::span<const double>(noise).subspan(p * len, len);
}

std::span<const double> PathEnsemble::path_states(std::size_t p) const {
  const std::size_t len = (grid.n_steps() + 1) * dim_state;
  return std::span<const double>(states).subspan(p * len, len);
}

Path PathEnsemble::path(std::size_t p, std::size_t component) const {
  std::vector<double> v(grid.n_steps() + 1);
  for (std::size_t i = 0; i <= grid.n_steps(); ++i) v[i] = state(p, i, component);
  return Path::on_grid(grid, std::move(v));
}

void fill_increments(const NormalStream& stream, const TimeGrid& grid, std::size_t dim_noise, std::size_t path,
                     std::size_t first, std::size_t last, std::span<double> out) {
  const double scale = std::sqrt(grid.dt());
  for (std::size_t i = first; i < last; ++i) {
    auto slot = out.subspan(i * dim_noise, dim_noise);
    stream.fill(path, i, slot);
    for (double& z : slot) z *= scale;
  }
}

VolterraStepper::VolterraStepper(CoefficientSpec coeff, const TimeGrid& grid)
    : coeff_(std::move(coeff)),
      grid_(grid),
      drift_w_(coeff_.drift_kernel, grid),
      diff_w_(coeff_.diffusion_kernel, grid),
      flat_(diff_w_.flat() && (!coeff_.has_drift() || drift_w_.flat())) {
  coeff_.validate();
}

VolterraStepper::State VolterraStepper::initial_state() const {
  const std::size_t n = grid_.n_steps();
  const std::size_t d = coeff_.dim_state;
  State s;
  s.states.assign((n + 1) * d, 0.0);
  if (flat_) {
    s.acc = coeff_.initial;
  } else {
    s.acc.resize((n + 1) * d);
    for (std::size_t j = 0; j <= n; ++j) std::copy(coeff_.initial.begin(), coeff_.initial.end(), s.acc.begin() + j * d);
  }
  return s;
}

void VolterraStepper::advance(State& state, std::span<const double> noise, std::size_t until, std::size_t path_id,
                              const RowCallback* row) const {
  const std::size_t n = grid_.n_steps();
  const std::size_t d = coeff_.dim_state;
  const std::size_t k = coeff_.dim_noise;
  const double dt = grid_.dt();
  until = std::min(until, n);
  std::vector<double> b(d), sig(d * k), db(d), dz(d);
  std::vector<double> scratch;

  auto emit_row = [&](std::size_t i) {
    if (!row) return;
    if (flat_) {
      scratch.resize((n + 1 - i) * d);
      for (std::size_t j = i; j <= n; ++j) std::copy(state.acc.begin(), state.acc.end(), scratch.begin() + (j - i) * d);
      (*row)(i, scratch);
    } else {
      (*row)(i, std::span<const double>(state.acc).subspan(i * d));
    }
  };
  auto current = [&](std::size_t i) { return flat_ ? state.acc.data() : state.acc.data() + i * d; };

  for (std::size_t i = state.step; i < until; ++i) {
    std::copy(current(i), current(i) + d, state.states.begin() + i * d);
    emit_row(i);
    const PathView view(state.states, d, i, grid_);
    const double t = grid_.time(i);
    coeff_.local_drift(t, view, b);
    coeff_.local_diffusion(t, view, sig);
    for (std::size_t c = 0; c < d; ++c) {
      db[c] = b[c] * dt;
      double z = 0.0;
      for (std::size_t m = 0; m < k; ++m) z += sig[c * k + m] * noise[i * k + m];
      dz[c] = z;
      if (!std::isfinite(db[c]) || !std::isfinite(dz[c]))
        throw SimulationError("non-finite coefficient", path_id, i);
    }
    if (flat_) {
      const double wm = drift_w_.mean(1, 0);
      const double wr = diff_w_.rms(1, 0);
      for (std::size_t c = 0; c < d; ++c) state.acc[c] += coeff_.has_drift() ? wm * db[c] + wr * dz[c] : wr * dz[c];
    } else if (coeff_.has_drift()) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        const double wm = drift_w_.mean(j, i);
        const double wr = diff_w_.rms(j, i);
        double* a = state.acc.data() + j * d;
        for (std::size_t c = 0; c < d; ++c) a[c] += wm * db[c] + wr * dz[c];
      }
    } else {
      for (std::size_t j = i + 1; j <= n; ++j) {
        const double wr = diff_w_.rms(j, i);
        double* a = state.acc.data() + j * d;
        for (std::size_t c = 0; c < d; ++c) a[c] += wr * dz[c];
      }
    }
  }
  state.step = std::max(state.step, until);
  if (until == n) {
    std::copy(current(n), current(n) + d, state.states.begin() + n * d);
    for (double v : std::span<const double>(state.states).subspan(n * d, d))
      if (!std::isfinite(v)) throw SimulationError("non-finite state", path_id, n);
    emit_row(n);
  }
}

void VolterraStepper::run(std::span<const double> noise, std::span<double> states_out, std::size_t path_id,
                          const RowCallback* row) const {
  State s = initial_state();
  advance(s, noise, grid_.n_steps(), path_id, row);
  std::copy(s.states.begin(), s.states.end(), states_out.begin());
}

void for_each_path(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                   const PathVisitor& visit) {
  if (n_paths == 0) throw ConfigError("n_paths must be at least 1");
  const VolterraStepper stepper(coeff, grid);
  const NormalStream stream(seed);
  const std::size_t n = grid.n_steps();
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> noise(n * coeff.dim_noise);
    std::vector<double> states((n + 1) * coeff.dim_state);
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(stream, grid, coeff.dim_noise, p, 0, n, noise);
      stepper.run(noise, states, p);
      visit(p, noise, states);
    }
  });
}

void for_each_continuation(const CoefficientSpec& coeff, const TimeGrid& grid, std::span<const double> prefix_noise,
                           std::size_t split, std::size_t n_paths, std::uint64_t seed, const PathVisitor& visit) {
  const std::size_t n = grid.n_steps();
  const std::size_t k = coeff.dim_noise;
  if (split > n) throw ConfigError("continuation split beyond the grid");
  if (prefix_noise.size() < split * k) throw ConfigError("prefix noise shorter than the split");
  const VolterraStepper stepper(coeff, grid);
  std::vector<double> base_noise(n * k, 0.0);
  std::copy(prefix_noise.begin(), prefix_noise.begin() + static_cast<std::ptrdiff_t>(split * k), base_noise.begin());
  VolterraStepper::State prefix = stepper.initial_state();
  stepper.advance(prefix, base_noise, split, 0);
  const NormalStream stream(seed);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> noise = base_noise;
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(stream, grid, k, p, split, n, noise);
      VolterraStepper::State s = prefix;
      stepper.advance(s, noise, n, p);
      visit(p, noise, s.states);
    }
  });
}

PathEnsemble simulate_from_noise(const CoefficientSpec& coeff, const TimeGrid& grid, std::vector<double> noise,
                                 std::uint64_t seed) {
  const std::size_t n = grid.n_steps();
  const std::size_t per_path = n * coeff.dim_noise;
  if (noise.empty() || noise.size() % per_path != 0) throw ConfigError("noise size does not match the grid");
  PathEnsemble e;
  e.grid = grid;
  e.dim_state = coeff.dim_state;
  e.dim_noise = coeff.dim_noise;
  e.seed = seed;
  e.path_count = noise.size() / per_path;
  e.noise = std::move(noise);
  e.states.resize(e.path_count * (n + 1) * coeff.dim_state);
  e.model = std::make_shared<const CoefficientSpec>(coeff);
  const VolterraStepper stepper(coeff, grid);
  const std::size_t len = (n + 1) * coeff.dim_state;
  parallel_for(e.path_count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p)
      stepper.run(e.path_noise(p), std::span<double>(e.states).subspan(p * len, len), p);
  });
  return e;
}

PathEnsemble simulate_ensemble(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t seed) {
  if (n_paths == 0) throw ConfigError("n_paths must be at least 1");
  const std::size_t n = grid.n_steps();
  PathEnsemble e;
  e.grid = grid;
  e.dim_state = coeff.dim_state;
  e.dim_noise = coeff.dim_noise;
  e.seed = seed;
  e.path_count = n_paths;
  e.noise.resize(n_paths * n * coeff.dim_noise);
  e.states.resize(n_paths * (n + 1) * coeff.dim_state);
  e.model = std::make_shared<const CoefficientSpec>(coeff);
  for_each_path(coeff, grid, n_paths, seed,
                [&](std::size_t p, std::span<const double> noise, std::span<const double> states) {
                  std::copy(noise.begin(), noise.end(), e.noise.begin() + static_cast<std::ptrdiff_t>(p * noise.size()));
                  std::copy(states.begin(), states.end(),
                            e.states.begin() + static_cast<std::ptrdiff_t>(p * states.size()));
                });
  return e;
}

PathEnsemble coarsen(const PathEnsemble& fine, const CoefficientSpec& coeff, std::size_t factor) {
  const std::size_t n = fine.grid.n_steps();
  if (factor == 0 || n % factor != 0) throw ConfigError("coarsening factor must divide the step count");
  const TimeGrid coarse(fine.grid.horizon(), n / factor);
  const std::size_t k = fine.dim_noise;
  std::vector<double> noise(fine.path_count * coarse.n_steps() * k, 0.0);
  for (std::size_t p = 0; p < fine.path_count; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < k; ++m) noise[(p * coarse.n_steps() + i / factor) * k + m] += fine.increment(p, i, m);
  return simulate_from_noise(coeff, coarse, std::move(noise), fine.seed);
}

ThetaField::ThetaField(const TimeGrid& grid, std::size_t dim) : grid_(grid), dim_(dim) {
  values_.resize(offset(grid.n_steps() + 1));
}

std::size_t ThetaField::offset(std::size_t i) const noexcept {
  const std::size_t n1 = grid_.n_steps() + 1;
  return dim_ * (i * n1 - i * (i - (i > 0 ? 1 : 0)) / 2);
}

double ThetaField::operator()(std::size_t i, std::size_t j, std::size_t c) const {
  if (i > grid_.n_steps() || j > grid_.n_steps() || j < i) throw DomainError("theta field index requires i <= j <= N");
  return values_[offset(i) + (j - i) * dim_ + c];
}

std::span<const double> ThetaField::row(std::size_t i) const {
  if (i > grid_.n_steps()) throw DomainError("theta row index beyond the grid");
  return std::span<const double>(values_).subspan(offset(i), (grid_.n_steps() + 1 - i) * dim_);
}

ThetaField theta_field(const PathEnsemble& ensemble, const CoefficientSpec& coeff, std::size_t path_index,
                       std::optional<TruncationConfig> truncation) {
  if (path_index >= ensemble.path_count) throw DomainError("path index out of range");
  const CoefficientSpec model = truncation ? coeff.truncated(truncation->delta) : coeff;
  ThetaField field(ensemble.grid, coeff.dim_state);
  field.truncation_ = std::move(truncation);
  const auto noise = ensemble.path_noise(path_index);
  field.noise_.assign(noise.begin(), noise.end());
  field.states_.resize((ensemble.grid.n_steps() + 1) * coeff.dim_state);
  const VolterraStepper stepper(model, ensemble.grid);
  const VolterraStepper::RowCallback row = [&](std::size_t i, std::span<const double> r) {
    std::copy(r.begin(), r.end(), field.values_.begin() + static_cast<std::ptrdiff_t>(field.offset(i)));
  };
  stepper.run(noise, field.states_, path_index, &row);
  return field;
}

ConcatPath concat(const ThetaField& field, std::size_t i, std::size_t component) {
  const std::size_t n = field.grid().n_steps();
  if (i > n) throw DomainError("concat index beyond the grid");
  if (component >= field.dim()) throw DomainError("concat component out of range");
  ConcatPath out;
  out.grid = field.grid();
  out.split = i;
  out.values.resize(n + 1);
  for (std::size_t j = 0; j < i; ++j) out.values[j] = field.states()[j * field.dim() + component];
  for (std::size_t j = i; j <= n; ++j) out.values[j] = field(i, j, component);
  return out;
}

PathEnsemble piecewise_freeze(const PathEnsemble& ensemble, const CoefficientSpec& coeff, int level) {
  const std::size_t n = ensemble.grid.n_steps();
  if (level < 0 || level > 62) throw ConfigError("freeze level out of range");
  const std::size_t blocks = std::size_t{1} << level;
  if (n % blocks != 0) throw ConfigError("2^level must divide the number of steps");
  const std::size_t width = n / blocks;
  const std::size_t d = coeff.dim_state;
  PathEnsemble out = ensemble;
  const VolterraStepper stepper(coeff, ensemble.grid);
  parallel_for(ensemble.path_count, [&](std::size_t begin, std::size_t end) {
    std::vector<double> states((n + 1) * d);
    for (std::size_t p = begin; p < end; ++p) {
      double* frozen = out.states.data() + p * (n + 1) * d;
      const VolterraStepper::RowCallback row = [&](std::size_t i, std::span<const double> r) {
        if (i % width != 0 || i == n) return;
        for (std::size_t j = i; j < i + width; ++j)
          for (std::size_t c = 0; c < d; ++c) frozen[j * d + c] = r[(j - i) * d + c];
      };
      stepper.run(ensemble.path_noise(p), states, p, &row);
      for (std::size_t c = 0; c < d; ++c) frozen[n * d + c] = states[n * d + c];
    }
  });
  return out;
}

PathEnsemble piecewise_freeze(const PathEnsemble& ensemble, int level) {
  if (!ensemble.model) throw ConfigError("ensemble carries no coefficients; pass them explicitly");
  return piecewise_freeze(ensemble, *ensemble.model, level);
}

}  // namespace volterra
