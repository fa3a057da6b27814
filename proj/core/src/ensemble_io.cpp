#include "volterra/ensemble_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>

#include "volterra/errors.hpp"

namespace volterra {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw ConfigError("truncated ensemble file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_ensemble_csv(const PathEnsemble& ensemble, std::ostream& out) {
  out << "path,step,time";
  for (std::size_t c = 0; c < ensemble.dim_state; ++c) out << ",x" << c;
  out << '\n';
  const std::size_t n = ensemble.grid.n_steps();
  for (std::size_t p = 0; p < ensemble.path_count; ++p)
    for (std::size_t i = 0; i <= n; ++i) {
      out << p << ',' << i << ',' << format_double(ensemble.grid.time(i));
      for (std::size_t c = 0; c < ensemble.dim_state; ++c) out << ',' << format_double(ensemble.state(p, i, c));
      out << '\n';
    }
}

void write_ensemble_csv(const PathEnsemble& ensemble, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  write_ensemble_csv(ensemble, out);
}

void write_ensemble_binary(const PathEnsemble& ensemble, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out.write("VTPE", 4);
  put_le<std::uint32_t>(out, kEnsembleFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ensemble.dim_state));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ensemble.dim_noise));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ensemble.grid.n_steps()));
  put_le<std::uint64_t>(out, ensemble.path_count);
  put_le<std::uint64_t>(out, ensemble.seed);
  put_le<double>(out, ensemble.grid.horizon());
  for (std::size_t p = 0; p < ensemble.path_count; ++p) {
    for (double v : ensemble.path_noise(p)) put_le<double>(out, v);
    for (double v : ensemble.path_states(p)) put_le<double>(out, v);
  }
}

PathEnsemble read_ensemble_binary(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::array<char, 4> magic;
  if (!in.read(magic.data(), 4) || std::string(magic.data(), 4) != "VTPE") throw ConfigError("not an ensemble dump");
  if (get_le<std::uint32_t>(in) != kEnsembleFormatVersion) throw ConfigError("unsupported ensemble dump version");
  PathEnsemble e;
  e.dim_state = get_le<std::uint32_t>(in);
  e.dim_noise = get_le<std::uint32_t>(in);
  const std::size_t n = get_le<std::uint32_t>(in);
  e.path_count = get_le<std::uint64_t>(in);
  e.seed = get_le<std::uint64_t>(in);
  e.grid = TimeGrid(get_le<double>(in), n);
  e.noise.resize(e.path_count * n * e.dim_noise);
  e.states.resize(e.path_count * (n + 1) * e.dim_state);
  for (std::size_t p = 0; p < e.path_count; ++p) {
    for (std::size_t i = 0; i < n * e.dim_noise; ++i) e.noise[p * n * e.dim_noise + i] = get_le<double>(in);
    for (std::size_t i = 0; i < (n + 1) * e.dim_state; ++i)
      e.states[p * (n + 1) * e.dim_state + i] = get_le<double>(in);
  }
  return e;
}

}  // namespace volterra
