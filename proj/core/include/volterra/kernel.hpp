#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

enum class KernelFamily { RiemannLiouvilleNormalized, Constant, UserTabulated };

std::string to_string(KernelFamily family);

/// A deterministic Volterra kernel K(t, s), t > s.
///
/// RiemannLiouvilleNormalized: normalization * sqrt(2H) * (t - s)^(H - 1/2),
/// so that the integral of K(t, r)^2 over [0, t] is normalization^2 * t^(2H).
/// Constant: the value normalization (Brownian case, H = 1/2).
/// UserTabulated: an arbitrary positive callable, either a full two-time
/// function or a function of the gap t - s.
class KernelSpec {
 public:
  using Function = std::function<double(double t, double s)>;

  /// The constant kernel 1 (Brownian motion).
  KernelSpec() = default;

  static KernelSpec riemann_liouville(double hurst, double normalization = 1.0);
  static KernelSpec constant(double normalization = 1.0);
  /// Two-time kernel; `convolution` declares K(t, s) = k(t - s), which lets
  /// simulation weights be tabulated by lag only.
  static KernelSpec tabulated(double hurst, Function kernel, bool convolution = false);
  /// Kernel of the gap only, interpolated log-log between (gap, value) knots
  /// and extrapolated with the end slopes.
  static KernelSpec from_gap_table(double hurst, std::vector<double> gaps, std::vector<double> values);
  /// Two-column CSV (gap, value); a header line is allowed.
  static KernelSpec load_gap_csv(double hurst, const std::filesystem::path& file);

  KernelFamily family() const noexcept { return family_; }
  double hurst() const noexcept { return hurst_; }
  double normalization() const noexcept { return normalization_; }
  bool singular() const noexcept { return hurst_ < 0.5; }
  bool convolution() const noexcept { return convolution_; }
  /// Truncation gap delta of phi^delta, or 0 when untruncated.
  double truncation() const noexcept { return truncation_; }

  /// The truncated kernel K(t v (s + delta), s).
  KernelSpec truncated(double delta) const;

  /// Evaluates K(t, s). Throws DomainError for s >= t, gaps below 1e-12 and
  /// non-finite inputs.
  double operator()(double t, double s) const;

  /// Integral over u in [a, b] of K(t, u), with b <= t.
  double integral(double t, double a, double b) const;
  /// Integral over u in [a, b] of K(t, u)^2, with b <= t.
  double square_integral(double t, double a, double b) const;
  /// Integral over r in [0, min(s, t)] of K(s, r) K(t, r).
  double product_integral(double s, double t) const;

 private:
  double raw(double t, double s) const;

  KernelFamily family_ = KernelFamily::Constant;
  double hurst_ = 0.5;
  double normalization_ = 1.0;
  double truncation_ = 0.0;
  bool convolution_ = true;
  std::shared_ptr<const Function> user_;
};

/// Minimal gap accepted by kernel evaluation.
inline constexpr double kMinKernelGap = 1e-12;

double eval_kernel(const KernelSpec& spec, double t, double s);

/// Truncation phi^delta(t; s) = phi(t v (s + delta); s) and the dyadic
/// sequence delta_n = 2^-n used for singular limits.
struct TruncationConfig {
  double delta = 0.0;
  std::vector<double> dyadic_sequence;

  static TruncationConfig dyadic(int n_min, int n_max);
};

double eval_kernel_truncated(const KernelSpec& spec, const TruncationConfig& cfg, double t, double s);

/// sigma-bar^2(s, t): integral of K(s, r)^2 over r in [t, s], for t < s.
double cumulative_variance(const KernelSpec& spec, double t, double s);
/// As cumulative_variance, with the quadrature error bound (zero for closed forms).
QuadratureResult cumulative_variance_with_error(const KernelSpec& spec, double t, double s);

/// Simulation weights on a uniform grid. For the cell [t_r, t_{r+1}] and an
/// evaluation time t_j with j > r:
///   mean(j, r) = (1/dt) * integral of K(t_j, u) over the cell   (drift)
///   rms(j, r)  = sqrt((1/dt) * integral of K(t_j, u)^2 over the cell) (noise)
/// The root-mean-square weight makes the simulated conditional variance of
/// every Theta column equal to cumulative_variance exactly.
class CellWeights {
 public:
  CellWeights(const KernelSpec& spec, const TimeGrid& grid);

  double mean(std::size_t j, std::size_t r) const noexcept { return mean_[index(j, r)]; }
  double rms(std::size_t j, std::size_t r) const noexcept { return rms_[index(j, r)]; }
  /// True when every weight is the same number (constant kernel).
  bool flat() const noexcept { return flat_; }
  std::size_t n_steps() const noexcept { return n_; }

 private:
  std::size_t index(std::size_t j, std::size_t r) const noexcept {
    if (flat_) return 0;
    if (by_lag_) return j - r - 1;
    return j * (j - 1) / 2 + r;
  }

  std::size_t n_;
  bool flat_ = false;
  bool by_lag_ = false;
  std::vector<double> mean_;
  std::vector<double> rms_;
};

}  // namespace volterra
