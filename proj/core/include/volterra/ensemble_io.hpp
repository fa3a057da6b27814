#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "volterra/simulate.hpp"

namespace volterra {

/// Shortest round-trip decimal form of a double (locale independent).
std::string format_double(double v);

/// CSV with header path,step,time,x0..x{d-1}; one row per (path, node).
void write_ensemble_csv(const PathEnsemble& ensemble, std::ostream& out);
void write_ensemble_csv(const PathEnsemble& ensemble, const std::filesystem::path& file);

/// Binary dump, all fields little-endian:
///   "VTPE" | u32 version | u32 d | u32 k | u32 N | u64 paths | u64 seed | f64 horizon
///   then per path: N*k increments followed by (N+1)*d states (f64).
inline constexpr std::uint32_t kEnsembleFormatVersion = 1;
void write_ensemble_binary(const PathEnsemble& ensemble, const std::filesystem::path& file);
PathEnsemble read_ensemble_binary(const std::filesystem::path& file);

}  // namespace volterra
