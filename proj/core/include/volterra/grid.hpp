#pragma once

#include <cstddef>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

/// Uniform grid t_i = i*T/N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0)) throw ConfigError("time grid horizon must be positive");
    if (n_steps == 0) throw ConfigError("time grid needs at least one step");
  }

  double horizon() const noexcept { return horizon_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
  double time(std::size_t i) const noexcept {
    return i == n_steps_ ? horizon_ : horizon_ * static_cast<double>(i) / static_cast<double>(n_steps_);
  }
  std::vector<double> nodes() const {
    std::vector<double> out(n_steps_ + 1);
    for (std::size_t i = 0; i <= n_steps_; ++i) out[i] = time(i);
    return out;
  }
  /// Index of the node nearest to t (clamped to the grid).
  std::size_t nearest_index(double t) const noexcept;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t n_steps_;
};

inline std::size_t TimeGrid::nearest_index(double t) const noexcept {
  if (t <= 0.0) return 0;
  if (t >= horizon_) return n_steps_;
  const double x = t / dt();
  const auto i = static_cast<std::size_t>(x + 0.5);
  return i > n_steps_ ? n_steps_ : i;
}

}  // namespace volterra
