#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "volterra/coefficients.hpp"
#include "volterra/functional.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"

namespace volterra {

enum class FDScheme { Central, Forward };

/// Finite-difference steps. A zero epsilon means 1e-4 * (1 + |omega|_inf);
/// a zero time_step means dt/4 of the grid in use (required for
/// right_time_derivative called without a grid).
struct FDConfig {
  double epsilon = 0.0;
  double time_step = 0.0;
  FDScheme scheme = FDScheme::Central;

  void validate() const;
  double epsilon_for(const Path& omega) const;
};

/// <d_omega u(t, omega), eta> by differences of u(t, omega +/- eps eta 1_[t,T]).
double directional_derivative(const Functional& u, double t, const Path& omega, const Direction& eta,
                              const FDConfig& cfg);

/// <d^2_omega u(t, omega), (eta1, eta2)> by nested central differences.
double second_directional(const Functional& u, double t, const Path& omega, const Direction& eta1,
                          const Direction& eta2, const FDConfig& cfg);

/// Forward difference [u(t + h, omega) - u(t, omega)] / h with omega frozen.
double right_time_derivative(const Functional& u, double t, const Path& omega, const FDConfig& cfg);

enum class PairingKind { Drift, Diffusion, Second };

/// A truncated-limit pairing sequence and its fitted rate.
struct SingularPairing {
  std::vector<double> deltas;
  std::vector<double> values;
  double extrapolated = 0.0;
  double observed_rate = 0.0;  ///< beta; for Second the fitted exponent is halved
  double fitted_exponent = 0.0;
  double r_squared = 1.0;
  bool exact = false;  ///< the sequence is constant from some delta on
};

struct PairingOptions {
  int n_min = 4;
  int n_max = 10;
  double min_r_squared = 0.9;
  std::size_t min_points = 5;
  bool use_closed = true;  ///< use closed-form derivatives when the functional has them
  FDConfig fd;
  /// Grid on which omega's past is read by the local coefficients.
  std::optional<TimeGrid> grid;
};

/// Fits |v_n - v_{n+1}| ~ C delta_n^q on log-log axes and extrapolates the
/// limit with the fitted geometric ratio. Throws NonConvergenceError when the
/// fit has fewer than min_points points, r^2 below the threshold or q <= 0.
SingularPairing fit_pairing_sequence(std::vector<double> deltas, std::vector<double> values, PairingKind kind,
                                     const PairingOptions& opts = {});

/// Pairing of the path derivatives of u with the truncated coefficient
/// curves s -> phi(s v (t + delta); t, omega) along delta_n = 2^-n.
SingularPairing singular_pairing(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                                 PairingKind which, const PairingOptions& opts = {});

/// Direct pairing at zero truncation (regular kernels, H >= 1/2).
double direct_pairing(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                      PairingKind which, const PairingOptions& opts = {});

struct ItoOptions {
  FDConfig fd;
  bool use_closed = false;
  /// Pair singular kernels through the truncated limit (otherwise directly).
  bool singular_limit = true;
  PairingOptions pairing;
  /// Coarsening factors applied to the supplied ensemble (1 = as simulated).
  std::vector<std::size_t> coarsen_factors{1};
  std::size_t max_paths = 0;  ///< 0 uses every path
};

/// Terms of the functional Ito formula at one (t_i, X (x)_{t_i} Theta^{t_i}):
/// d_t u, <d u, b>, sum_m <d^2 u, (sigma_m, sigma_m)> and <d u, sigma_m> per
/// noise column. Local coefficients are read from `past` (the simulated
/// states up to step i).
struct GeneratorTerms {
  double time = 0.0;
  double drift = 0.0;
  double second = 0.0;
  std::vector<double> diffusion;
  std::vector<double> observed_rates;  ///< rates of the singular limits taken
};

/// With `diffusion_only` the time, drift and second-order terms are left at zero.
GeneratorTerms generator_terms(const Functional& u, double t, const Path& omega, const CoefficientSpec& coeff,
                               const PathView& past, const ItoOptions& opts, bool diffusion_only = false);

struct ItoLevel {
  std::size_t n_steps = 0;
  double dt = 0.0;
  double rms = 0.0;
  MeanEstimate mismatch;
};

struct ItoReport {
  std::vector<ItoLevel> levels;
  std::optional<SlopeFit> order;  ///< log rms against log dt when >= 2 levels
  std::vector<double> pairing_rates;
};

/// Accumulates the right side of the functional Ito formula along each path
/// and compares it with u(T, X) - u(0, Theta^0).
ItoReport ito_certify(const Functional& u, const CoefficientSpec& coeff, const PathEnsemble& ensemble,
                      const ItoOptions& opts = {});

}  // namespace volterra
