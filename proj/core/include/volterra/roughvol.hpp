#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "volterra/forward_variance.hpp"
#include "volterra/payoff.hpp"
#include "volterra/simulate.hpp"

namespace volterra {

struct RoughHestonParams {
  double s0 = 100.0;
  double v0 = 0.04;
  double hurst = 0.1;
  double mean_rev_rate = 0.3;   ///< lambda
  double mean_rev_level = 0.04; ///< theta
  double vol_of_vol = 0.3;      ///< nu
  double correlation = -0.7;    ///< rho

  void validate() const;
  RelaxationParams relaxation() const { return {hurst, mean_rev_rate, mean_rev_level}; }
};

struct RoughBergomiParams {
  double s0 = 100.0;
  double v0 = 0.04;
  double hurst = 0.1;
  double vol_of_vol = 1.0;  ///< lambda_B
  double correlation = -0.7;

  void validate() const;
};

enum class VolModelKind { RoughHeston, RoughBergomi };

/// Stock price plus a scalar Volterra driver x (V for rough Heston, M for
/// rough Bergomi). The driver is stepped by VolterraStepper with noise column
/// 1 (W^2); the stock takes exact lognormal steps given the left-point
/// variance, driven by rho dW^2 + sqrt(1 - rho^2) dW^1.
///
/// Ensemble states are (S, x) and noise is (dW^1, dW^2) per step.
class VolatilityModel {
 public:
  static VolatilityModel heston(const RoughHestonParams& p, const TimeGrid& grid);
  static VolatilityModel bergomi(const RoughBergomiParams& p, const TimeGrid& grid);

  VolModelKind kind() const noexcept { return kind_; }
  const TimeGrid& grid() const noexcept { return stepper_.grid(); }
  const VolterraStepper& driver() const noexcept { return stepper_; }
  double s0() const noexcept { return s0_; }
  double v0() const noexcept { return v0_; }
  double hurst() const noexcept { return hurst_; }
  double correlation() const noexcept { return rho_; }
  const std::optional<RoughHestonParams>& heston_params() const noexcept { return heston_; }
  const std::optional<RoughBergomiParams>& bergomi_params() const noexcept { return bergomi_; }

  /// Instantaneous variance from the driver at grid step i: max(x, 0) for
  /// rough Heston, V0 exp(x - lambda^2 t^(2H) / 2) for rough Bergomi.
  double variance(double x, std::size_t step) const;

  /// Per-path stock cap; hits are counted and reported.
  static constexpr double kStockCap = 1e12;

  /// One full path. `rows` receives the driver's Theta rows.
  void run_path(std::span<const double> noise, std::span<double> states, std::size_t path_id,
                const VolterraStepper::RowCallback* rows = nullptr, std::size_t* cap_hits = nullptr) const;

  PathEnsemble simulate(std::size_t n_paths, std::uint64_t seed, std::size_t* cap_hits = nullptr) const;

  /// Driver Theta row at step i of an ensemble path: Theta^{t_i}_{s_j}, j = i..N.
  std::vector<double> theta_row(const PathEnsemble& ensemble, std::size_t path, std::size_t i) const;

  /// Future of one path given the driver's Theta row at step i: fills the
  /// driver values x_j for j = i..N using the noise of steps >= i.
  void continue_driver(std::size_t i, std::span<const double> theta_row, std::span<const double> noise,
                       std::size_t path_id, std::span<double> driver_out) const;

 private:
  VolatilityModel(VolModelKind kind, CoefficientSpec driver, const TimeGrid& grid);

  VolModelKind kind_;
  VolterraStepper stepper_;
  double s0_ = 100.0;
  double v0_ = 0.04;
  double hurst_ = 0.1;
  double rho_ = 0.0;
  double bergomi_lambda_ = 0.0;
  std::optional<RoughHestonParams> heston_;
  std::optional<RoughBergomiParams> bergomi_;
};

PathEnsemble simulate_heston(const RoughHestonParams& p, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed);
PathEnsemble simulate_bergomi(const RoughBergomiParams& p, const TimeGrid& grid, std::size_t n_paths,
                              std::uint64_t seed, std::size_t* cap_hits = nullptr);

/// Theta^t on [t, T] and the forward variance hat^t_s = E[V_s | F_t].
struct ForwardVarianceCurve {
  double anchor_time = 0.0;
  std::vector<double> horizons;
  std::vector<double> theta_values;
  std::vector<double> hat_values;
};

/// Rough Heston: Theta^{t_i} from the simulated path and hat from theta_to_hat.
ForwardVarianceCurve heston_theta(const PathEnsemble& ensemble, const RoughHestonParams& p, std::size_t path,
                                  std::size_t i);

/// Rough Bergomi: Theta = E[M_s | F_t] and hat_s = V0 exp(Theta_s + lambda^2 ((s - t)^(2H) - s^(2H)) / 2).
ForwardVarianceCurve bergomi_curve(const VolatilityModel& model, std::span<const double> theta_row, std::size_t i);
double bergomi_forward_variance(const RoughBergomiParams& p, double t, double s, double theta_s);

/// Black-Scholes value of the call / put at zero rate from total variance.
double black_scholes_call(double spot, double strike, double total_variance);
double black_scholes_put(double spot, double strike, double total_variance);
/// E[g(spot exp(sqrt(v) Z - v / 2))]; closed form for calls and puts.
double lognormal_expectation(const Payoff& g, double spot, double total_variance);

/// g(S_T) + int_t^T f(s, S_s) ds.
struct Claim {
  Payoff terminal = Payoff::identity();
  RunningCost running;
};

enum class PricingMethod {
  FullMonteCarlo,
  /// Averages the conditional expectation given W^2 (needs f = 0): with
  /// I = int sqrt(v) dW^2 and IV = int v ds it is
  /// E[g(S_t exp(rho I - rho^2 IV / 2) exp(sqrt((1 - rho^2) IV) Z - (1 - rho^2) IV / 2))].
  Conditional,
};

struct PricingConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  PricingMethod method = PricingMethod::Conditional;
  /// Flag the estimate when its standard error exceeds this (0 disables).
  double max_std_error = 0.0;
};

struct PriceEstimate {
  double price = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  bool flagged = false;
};

/// Nested price at step i given S_{t_i} and the driver's Theta row.
PriceEstimate price_claim(const VolatilityModel& model, const Claim& claim, std::size_t i, double spot,
                          std::span<const double> theta_row, const PricingConfig& cfg);

struct HedgeRatioConfig {
  PricingConfig pricing;
  double stock_bump = 0.01;  ///< relative to S0
  double curve_bump = 0.01;  ///< relative to v0 (rough Heston) or 1 (rough Bergomi)
};

struct HedgeRatios {
  double price = 0.0;
  double delta_stock = 0.0;
  /// (T - t)^(1/2 - H) <d_w u, a^t>, divided by hat^t_T for rough Bergomi.
  double delta_fv = 0.0;
  double pairing = 0.0;  ///< <d_w u, a^t>
  double se_stock = 0.0;
  double se_pairing = 0.0;
  bool unstable = false;  ///< a standard error exceeds half its estimate
};

/// Finite-difference ratios with common random numbers: S bumped centrally;
/// the Theta row bumped along a^t_s = (s - t)^(H - 1/2) for s >= t + dt.
HedgeRatios hedge_ratios(const VolatilityModel& model, const Claim& claim, std::size_t i, double spot,
                         std::span<const double> theta_row, const HedgeRatioConfig& cfg);

}  // namespace volterra
