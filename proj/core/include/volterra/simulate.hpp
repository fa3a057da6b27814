#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "volterra/coefficients.hpp"
#include "volterra/grid.hpp"
#include "volterra/kernel.hpp"
#include "volterra/path.hpp"
#include "volterra/rng.hpp"

namespace volterra {

/// Monte Carlo ensemble. Arrays are path-major: noise holds N*k Brownian
/// increments per path, states holds (N+1)*d values per path.
struct PathEnsemble {
  TimeGrid grid{1.0, 1};
  std::size_t dim_state = 1;
  std::size_t dim_noise = 1;
  std::uint64_t seed = 0;
  std::size_t path_count = 0;
  std::vector<double> noise;
  std::vector<double> states;
  /// Coefficients the ensemble was simulated with, when known.
  std::shared_ptr<const CoefficientSpec> model;

  std::span<const double> path_noise(std::size_t p) const;
  std::span<const double> path_states(std::size_t p) const;
  double state(std::size_t p, std::size_t i, std::size_t c = 0) const {
    return states[(p * (grid.n_steps() + 1) + i) * dim_state + c];
  }
  double increment(std::size_t p, std::size_t i, std::size_t m = 0) const {
    return noise[(p * grid.n_steps() + i) * dim_noise + m];
  }
  /// One state component of one path as a grid path.
  Path path(std::size_t p, std::size_t component = 0) const;
};

/// Brownian increments of one path for steps [first, last), scaled by sqrt(dt).
void fill_increments(const NormalStream& stream, const TimeGrid& grid, std::size_t dim_noise, std::size_t path,
                     std::size_t first, std::size_t last, std::span<double> out);

/// Single-path Euler engine for the Volterra SDE.
///
/// A running row acc[j] = Theta^{t_i}_{s_j} (j >= i) is kept. At step i the
/// state is X_{t_i} = acc[i], the local coefficients are evaluated on the path
/// so far, and every later column is updated with the drift weight times
/// b*dt plus the noise weight times sigma*dW. Theta rows and states therefore
/// share one summation order, so Theta^{t_i}_{t_i} equals X_{t_i} bit for bit.
class VolterraStepper {
 public:
  VolterraStepper(CoefficientSpec coeff, const TimeGrid& grid);

  struct State {
    std::vector<double> acc;
    std::vector<double> states;
    std::size_t step = 0;
  };

  /// Receives Theta^{t_i}_{s_j} for j = i..N, d values per node.
  using RowCallback = std::function<void(std::size_t i, std::span<const double> row)>;

  State initial_state() const;
  /// Advances to step `until` using noise (N*k values; only steps >= state.step are read).
  void advance(State& state, std::span<const double> noise, std::size_t until, std::size_t path_id,
               const RowCallback* row = nullptr) const;
  void run(std::span<const double> noise, std::span<double> states_out, std::size_t path_id,
           const RowCallback* row = nullptr) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  const CoefficientSpec& coeff() const noexcept { return coeff_; }
  bool flat() const noexcept { return flat_; }

 private:
  CoefficientSpec coeff_;
  TimeGrid grid_;
  CellWeights drift_w_;
  CellWeights diff_w_;
  bool flat_;
};

/// Called once per path, possibly from several threads at once, with that
/// path's increments and states.
using PathVisitor =
    std::function<void(std::size_t path, std::span<const double> noise, std::span<const double> states)>;

/// Streams paths without storing the ensemble.
void for_each_path(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                   const PathVisitor& visit);

/// Streams paths that share the first `split` increments (prefix_noise) and
/// draw fresh increments afterwards: the conditional law given F_{t_split}.
void for_each_continuation(const CoefficientSpec& coeff, const TimeGrid& grid, std::span<const double> prefix_noise,
                           std::size_t split, std::size_t n_paths, std::uint64_t seed, const PathVisitor& visit);

PathEnsemble simulate_ensemble(const CoefficientSpec& coeff, const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t seed);

/// Re-simulates states from supplied increments (path-major, N*k per path).
PathEnsemble simulate_from_noise(const CoefficientSpec& coeff, const TimeGrid& grid, std::vector<double> noise,
                                 std::uint64_t seed = 0);

/// Coarser ensemble driven by the sums of `factor` consecutive increments.
PathEnsemble coarsen(const PathEnsemble& fine, const CoefficientSpec& coeff, std::size_t factor);

/// The two-parameter field Theta[i][j] = Theta^{t_i}_{s_j}, j >= i, of one path.
class ThetaField {
 public:
  ThetaField(const TimeGrid& grid, std::size_t dim);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j, std::size_t c = 0) const;
  /// Row i: d values per node j = i..N.
  std::span<const double> row(std::size_t i) const;
  std::span<const double> states() const noexcept { return states_; }
  std::span<const double> noise() const noexcept { return noise_; }
  const std::optional<TruncationConfig>& truncation() const noexcept { return truncation_; }

 private:
  friend ThetaField theta_field(const PathEnsemble&, const CoefficientSpec&, std::size_t,
                                std::optional<TruncationConfig>);
  std::size_t offset(std::size_t i) const noexcept;

  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
  std::vector<double> states_;
  std::vector<double> noise_;
  std::optional<TruncationConfig> truncation_;
};

/// Recomputes the field of one path from its increments. With a truncation,
/// the path is re-run with the truncated coefficients (X^delta, Theta^delta).
ThetaField theta_field(const PathEnsemble& ensemble, const CoefficientSpec& coeff, std::size_t path_index,
                       std::optional<TruncationConfig> truncation = std::nullopt);

/// The path w (x)_t theta: X before t_i and Theta^{t_i} from t_i on.
struct ConcatPath {
  TimeGrid grid{1.0, 1};
  std::size_t split = 0;
  std::vector<double> values;

  double split_time() const noexcept { return grid.time(split); }
  std::span<const double> pre() const noexcept { return std::span<const double>(values).first(split); }
  std::span<const double> post() const noexcept { return std::span<const double>(values).subspan(split); }
  Path to_path() const { return Path::on_grid(grid, values); }
};

ConcatPath concat(const ThetaField& field, std::size_t i, std::size_t component = 0);

/// X^n: on each dyadic block [t_k, t_{k+1}) of 2^-level * T the state is
/// Theta^{t_k}, and X^n_T = X_T.
PathEnsemble piecewise_freeze(const PathEnsemble& ensemble, const CoefficientSpec& coeff, int level);
/// Uses the coefficients stored in the ensemble.
PathEnsemble piecewise_freeze(const PathEnsemble& ensemble, int level);

}  // namespace volterra
