#pragma once

#include <cstddef>
#include <functional>

namespace volterra {

/// Number of worker threads used by parallel loops. Defaults to the hardware
/// concurrency. Results never depend on this value: work is split into
/// fixed chunks and every per-item result is written to its own slot.
std::size_t thread_count() noexcept;
void set_thread_count(std::size_t n) noexcept;

/// RAII override of the worker count for the current scope.
class ThreadCountGuard {
 public:
  explicit ThreadCountGuard(std::size_t n) noexcept : saved_(thread_count()) { set_thread_count(n); }
  ~ThreadCountGuard() { set_thread_count(saved_); }
  ThreadCountGuard(const ThreadCountGuard&) = delete;
  ThreadCountGuard& operator=(const ThreadCountGuard&) = delete;

 private:
  std::size_t saved_;
};

/// Calls body(begin, end) over a static partition of [0, n). If several
/// chunks throw, the exception of the lowest chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace volterra
