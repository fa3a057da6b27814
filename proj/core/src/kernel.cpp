#include "volterra/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "volterra/errors.hpp"

namespace volterra {
namespace {

// x^p - y^p without cancellation for x close to y (x >= y >= 0).
double power_difference(double x, double y, double p) {
  if (y <= 0.0) return std::pow(x, p);
  return std::pow(y, p) * std::expm1(p * std::log(x / y));
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite ") + what);
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::RiemannLiouvilleNormalized:
      return "riemann-liouville";
    case KernelFamily::Constant:
      return "constant";
    case KernelFamily::UserTabulated:
      return "tabulated";
  }
  return "unknown";
}

KernelSpec KernelSpec::riemann_liouville(double hurst, double normalization) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst index must lie in (0, 1)");
  if (!(normalization > 0.0)) throw ConfigError("kernel normalization must be positive");
  KernelSpec k;
  k.family_ = KernelFamily::RiemannLiouvilleNormalized;
  k.hurst_ = hurst;
  k.normalization_ = normalization;
  return k;
}

KernelSpec KernelSpec::constant(double normalization) {
  if (!(normalization > 0.0)) throw ConfigError("kernel normalization must be positive");
  KernelSpec k;
  k.family_ = KernelFamily::Constant;
  k.hurst_ = 0.5;
  k.normalization_ = normalization;
  return k;
}

KernelSpec KernelSpec::tabulated(double hurst, Function kernel, bool convolution) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst index must lie in (0, 1)");
  if (!kernel) throw ConfigError("tabulated kernel needs a callable");
  KernelSpec k;
  k.family_ = KernelFamily::UserTabulated;
  k.hurst_ = hurst;
  k.convolution_ = convolution;
  k.user_ = std::make_shared<const Function>(std::move(kernel));
  return k;
}

KernelSpec KernelSpec::from_gap_table(double hurst, std::vector<double> gaps, std::vector<double> values) {
  if (gaps.size() != values.size() || gaps.size() < 2)
    throw ConfigError("gap table needs at least two (gap, value) rows");
  std::vector<double> lx(gaps.size()), ly(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0) || !(values[i] > 0.0)) throw ConfigError("gap table entries must be positive");
    if (i > 0 && !(gaps[i] > gaps[i - 1])) throw ConfigError("gap table must be strictly increasing");
    lx[i] = std::log(gaps[i]);
    ly[i] = std::log(values[i]);
  }
  auto interp = [lx = std::move(lx), ly = std::move(ly)](double t, double s) {
    const double x = std::log(t - s);
    std::size_t i = static_cast<std::size_t>(std::upper_bound(lx.begin(), lx.end(), x) - lx.begin());
    i = std::clamp<std::size_t>(i, 1, lx.size() - 1);
    const double w = (x - lx[i - 1]) / (lx[i] - lx[i - 1]);
    return std::exp(ly[i - 1] + w * (ly[i] - ly[i - 1]));
  };
  return tabulated(hurst, std::move(interp), true);
}

KernelSpec KernelSpec::load_gap_csv(double hurst, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open kernel table " + file.string());
  std::vector<double> gaps, values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double g = 0.0, v = 0.0;
    if (!(fields >> g >> v)) {
      if (gaps.empty() && line_no == 1) continue;  // header
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    gaps.push_back(g);
    values.push_back(v);
  }
  return from_gap_table(hurst, std::move(gaps), std::move(values));
}

KernelSpec KernelSpec::truncated(double delta) const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("truncation delta must be positive");
  KernelSpec k = *this;
  k.truncation_ = delta;
  return k;
}

double KernelSpec::raw(double t, double s) const {
  const double gap = std::max(t - s, truncation_);
  switch (family_) {
    case KernelFamily::RiemannLiouvilleNormalized:
      return normalization_ * std::sqrt(2.0 * hurst_) * std::pow(gap, hurst_ - 0.5);
    case KernelFamily::Constant:
      return normalization_;
    case KernelFamily::UserTabulated:
      return (*user_)(s + gap, s);
  }
  return 0.0;
}

double KernelSpec::operator()(double t, double s) const {
  require_finite(t, "kernel time t");
  require_finite(s, "kernel time s");
  if (s < 0.0) throw DomainError("kernel requires s >= 0");
  if (!(t > s)) throw DomainError("kernel requires s < t");
  if (t - s < kMinKernelGap) throw DomainError("kernel gap below 1e-12 is rejected");
  const double v = raw(t, s);
  if (!std::isfinite(v)) throw DomainError("kernel evaluated to a non-finite value");
  return v;
}

double KernelSpec::integral(double t, double a, double b) const {
  if (!(a <= b && b <= t)) throw DomainError("kernel integral requires a <= b <= t");
  if (b == a) return 0.0;
  const double cut = truncation_ > 0.0 ? std::clamp(t - truncation_, a, b) : b;
  double flat_part = 0.0;
  if (cut < b) flat_part = raw(t, t - truncation_) * (b - cut);
  if (cut == a) return flat_part;
  switch (family_) {
    case KernelFamily::RiemannLiouvilleNormalized: {
      const double alpha = hurst_ + 0.5;
      return normalization_ * std::sqrt(2.0 * hurst_) / alpha * power_difference(t - a, t - cut, alpha) + flat_part;
    }
    case KernelFamily::Constant:
      return normalization_ * (cut - a) + flat_part;
    case KernelFamily::UserTabulated: {
      auto f = [&](double u) { return (*user_)(t, u); };
      const auto r = (cut == t && singular()) ? integrate_right_singular(f, a, cut) : integrate_adaptive(f, a, cut);
      return r.value + flat_part;
    }
  }
  return 0.0;
}

double KernelSpec::square_integral(double t, double a, double b) const {
  if (!(a <= b && b <= t)) throw DomainError("kernel integral requires a <= b <= t");
  if (b == a) return 0.0;
  const double cut = truncation_ > 0.0 ? std::clamp(t - truncation_, a, b) : b;
  double flat_part = 0.0;
  if (cut < b) {
    const double v = raw(t, t - truncation_);
    flat_part = v * v * (b - cut);
  }
  if (cut == a) return flat_part;
  switch (family_) {
    case KernelFamily::RiemannLiouvilleNormalized:
      return normalization_ * normalization_ * power_difference(t - a, t - cut, 2.0 * hurst_) + flat_part;
    case KernelFamily::Constant:
      return normalization_ * normalization_ * (cut - a) + flat_part;
    case KernelFamily::UserTabulated: {
      auto f = [&](double u) {
        const double k = (*user_)(t, u);
        return k * k;
      };
      const auto r = (cut == t && singular()) ? integrate_right_singular(f, a, cut) : integrate_adaptive(f, a, cut);
      return r.value + flat_part;
    }
  }
  return 0.0;
}

double KernelSpec::product_integral(double s, double t) const {
  if (!(s > 0.0 && t > 0.0)) throw DomainError("product integral requires positive times");
  if (s == t) return square_integral(s, 0.0, s);
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  if (family_ == KernelFamily::Constant && truncation_ == 0.0) return normalization_ * normalization_ * lo;
  auto f = [&](double r) { return raw(lo, r) * raw(hi, r); };
  if (singular() && truncation_ == 0.0) return integrate_right_singular(f, 0.0, lo).value;
  return integrate_adaptive(f, 0.0, lo).value;
}

double eval_kernel(const KernelSpec& spec, double t, double s) { return spec(t, s); }

TruncationConfig TruncationConfig::dyadic(int n_min, int n_max) {
  if (n_max < n_min) throw ConfigError("dyadic sequence needs n_max >= n_min");
  TruncationConfig cfg;
  for (int n = n_min; n <= n_max; ++n) cfg.dyadic_sequence.push_back(std::ldexp(1.0, -n));
  cfg.delta = cfg.dyadic_sequence.front();
  return cfg;
}

double eval_kernel_truncated(const KernelSpec& spec, const TruncationConfig& cfg, double t, double s) {
  if (!(cfg.delta > 0.0)) throw DomainError("truncation delta must be positive");
  if (!(t > s)) throw DomainError("kernel requires s < t");
  return spec(std::max(t, s + cfg.delta), s);
}

QuadratureResult cumulative_variance_with_error(const KernelSpec& spec, double t, double s) {
  if (!std::isfinite(t) || !std::isfinite(s)) throw DomainError("non-finite time");
  if (!(t < s)) throw DomainError("cumulative variance requires t < s");
  QuadratureResult out;
  if (spec.family() != KernelFamily::UserTabulated) {
    out.value = spec.square_integral(s, t, s);
    return out;
  }
  auto f = [&](double r) {
    const double k = spec(s, std::min(r, s - kMinKernelGap));
    return k * k;
  };
  if (spec.truncation() > 0.0) return integrate_adaptive(f, t, s);
  return spec.singular() ? integrate_right_singular(f, t, s) : integrate_adaptive(f, t, s);
}

double cumulative_variance(const KernelSpec& spec, double t, double s) {
  return cumulative_variance_with_error(spec, t, s).value;
}

CellWeights::CellWeights(const KernelSpec& spec, const TimeGrid& grid) : n_(grid.n_steps()) {
  const double dt = grid.dt();
  if (spec.family() == KernelFamily::Constant && spec.truncation() == 0.0) {
    flat_ = true;
    mean_.assign(1, spec.normalization());
    rms_.assign(1, spec.normalization());
    return;
  }
  auto fill = [&](std::size_t slot, double t, double a, double b) {
    mean_[slot] = spec.integral(t, a, b) / dt;
    rms_[slot] = std::sqrt(spec.square_integral(t, a, b) / dt);
  };
  if (spec.convolution()) {
    by_lag_ = true;
    mean_.resize(n_);
    rms_.resize(n_);
    for (std::size_t lag = 1; lag <= n_; ++lag) {
      const double t = static_cast<double>(lag) * dt;
      fill(lag - 1, t, 0.0, dt);
    }
    return;
  }
  mean_.resize(n_ * (n_ + 1) / 2);
  rms_.resize(mean_.size());
  for (std::size_t j = 1; j <= n_; ++j)
    for (std::size_t r = 0; r < j; ++r) fill(index(j, r), grid.time(j), grid.time(r), grid.time(r + 1));
}

}  // namespace volterra
