#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace volterra {

/// Philox4x32-10 counter-based generator. Output is a pure function of
/// (key, counter), so any path/step can be generated independently.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const noexcept;

 private:
  Key key_;
};

/// Standard normal draws keyed by (seed, path, step). Each (path, step) pair
/// owns an independent substream, which makes path-parallel simulation
/// reproducible regardless of how paths are distributed over threads.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) noexcept : gen_(seed) {}

  /// Fill `out` with independent N(0,1) variates for the given (path, step).
  void fill(std::uint64_t path, std::uint64_t step, std::span<double> out) const noexcept;

  double single(std::uint64_t path, std::uint64_t step) const noexcept {
    double z = 0.0;
    fill(path, step, std::span<double>(&z, 1));
    return z;
  }

 private:
  Philox4x32 gen_;
};

/// SplitMix64 finalizer; used to derive disjoint seed subspaces
/// (e.g. nested Monte Carlo per outer path and date).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept;

}  // namespace volterra
