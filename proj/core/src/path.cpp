#include "volterra/path.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

Path::Path(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || times_.empty()) throw ConfigError("path needs matching, non-empty knots");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] < times_[i - 1]) throw ConfigError("path knots must be non-decreasing");
}

Path Path::on_grid(const TimeGrid& grid, std::vector<double> values) {
  if (values.size() != grid.n_steps() + 1) throw ConfigError("path values do not match the grid");
  return Path(grid.nodes(), std::move(values));
}

Path Path::constant(double horizon, double value) { return Path({0.0, horizon}, {value, value}); }

double Path::operator()(double s) const {
  // Last knot with time <= s gives right-continuity at repeated knots.
  const auto it = std::upper_bound(times_.begin(), times_.end(), s);
  if (it == times_.begin()) return values_.front();
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  if (hi == times_.size() || times_[lo] == s) return values_[lo];
  const double w = (s - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

double Path::left_limit(double s) const {
  // First knot with time >= s approached from the left.
  const auto it = std::lower_bound(times_.begin(), times_.end(), s);
  if (it == times_.begin()) return values_.front();
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  if (hi == times_.size()) return values_.back();
  if (times_[hi] == s) return values_[hi];
  const double w = (s - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

double Path::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::pair<double, double>> Path::segment(double a, double b) const {
  std::vector<std::pair<double, double>> out;
  if (b < a) return out;
  out.emplace_back(a, (*this)(a));
  if (b == a) return out;
  auto first = std::upper_bound(times_.begin(), times_.end(), a);
  auto last = std::lower_bound(times_.begin(), times_.end(), b);
  for (auto it = first; it != last; ++it) {
    const auto k = static_cast<std::size_t>(it - times_.begin());
    out.emplace_back(times_[k], values_[k]);
  }
  out.emplace_back(b, left_limit(b));
  return out;
}

Path Path::refined(std::span<const double> extra) const {
  std::vector<double> t, v;
  t.reserve(times_.size() + extra.size());
  v.reserve(times_.size() + extra.size());
  std::vector<double> add(extra.begin(), extra.end());
  std::sort(add.begin(), add.end());
  std::size_t k = 0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    while (k < add.size() && add[k] < times_[i]) {
      if (add[k] > times_.front() && (t.empty() || add[k] > t.back())) {
        t.push_back(add[k]);
        v.push_back((*this)(add[k]));
      }
      ++k;
    }
    while (k < add.size() && add[k] == times_[i]) ++k;
    t.push_back(times_[i]);
    v.push_back(values_[i]);
  }
  return Path(std::move(t), std::move(v));
}

Direction Direction::constant(double value) {
  return Direction{[value](double) { return value; }, 0.0, 0.0, {}};
}

Direction Direction::from_path(Path path) {
  std::vector<double> knots(path.times().begin(), path.times().end());
  return Direction{[p = std::move(path)](double s) { return p(s); }, 0.0, 0.0, std::move(knots)};
}

Direction Direction::power(double anchor, double exponent) {
  if (!(exponent > -1.0)) throw ConfigError("direction power must exceed -1");
  return Direction{[anchor, exponent](double s) { return std::pow(s - anchor, exponent); }, anchor, exponent, {}};
}

Direction kernel_direction(const KernelSpec& spec, double anchor, double scale) {
  Direction d;
  d.anchor = anchor;
  if (spec.truncation() > 0.0) {
    d.breakpoints.push_back(anchor + spec.truncation());
    d.fn = [spec, anchor, scale](double s) { return scale * spec(std::max(s, anchor + spec.truncation()), anchor); };
    return d;
  }
  if (spec.family() == KernelFamily::RiemannLiouvilleNormalized ||
      (spec.family() == KernelFamily::UserTabulated && spec.singular()))
    d.exponent = spec.hurst() - 0.5;
  if (d.exponent < 0.0) {
    d.fn = [spec, anchor, scale](double s) { return scale * spec(s, anchor); };
  } else {
    // Regular kernels extend continuously to the diagonal.
    d.fn = [spec, anchor, scale](double s) {
      return scale * spec(std::max(s, anchor + 2.0 * kMinKernelGap), anchor);
    };
  }
  return d;
}

Direction combine(double a, const Direction& x, double b, const Direction& y) {
  Direction d;
  d.fn = [a, b, fx = x.fn, fy = y.fn](double s) { return a * fx(s) + b * fy(s); };
  d.anchor = x.singular() ? x.anchor : y.anchor;
  d.exponent = std::min(x.exponent, y.exponent);
  d.breakpoints = x.breakpoints;
  d.breakpoints.insert(d.breakpoints.end(), y.breakpoints.begin(), y.breakpoints.end());
  return d;
}

Path bump(const Path& omega, double t, double eps, const Direction& eta) {
  auto ts = omega.times();
  auto vs = omega.values();
  std::vector<double> nt, nv;
  nt.reserve(ts.size() + eta.breakpoints.size() + 2);
  nv.reserve(nt.capacity());
  std::size_t k = 0;
  for (; k < ts.size() && ts[k] < t; ++k) {
    nt.push_back(ts[k]);
    nv.push_back(vs[k]);
  }
  auto shift = [&](double s) {
    const double e = eta(s);
    if (!std::isfinite(e)) throw DerivativeError("direction is not finite at s = " + std::to_string(s));
    return eps * e;
  };
  nt.push_back(t);
  nv.push_back(omega.left_limit(t));
  nt.push_back(t);
  nv.push_back(omega(t) + shift(t));
  std::vector<double> extra;
  for (double b : eta.breakpoints)
    if (b > t && b < omega.horizon()) extra.push_back(b);
  std::sort(extra.begin(), extra.end());
  std::size_t e = 0;
  for (; k < ts.size(); ++k) {
    if (ts[k] == t) continue;
    while (e < extra.size() && extra[e] <= ts[k]) {
      if (extra[e] < ts[k]) {
        nt.push_back(extra[e]);
        nv.push_back(omega(extra[e]) + shift(extra[e]));
      }
      ++e;
    }
    nt.push_back(ts[k]);
    nv.push_back(vs[k] + shift(ts[k]));
  }
  return Path(std::move(nt), std::move(nv));
}

double trapezoid(const Path& omega, double a, double b, const std::function<double(double, double)>& fn) {
  const auto knots = omega.segment(a, b);
  double sum = 0.0;
  double prev_t = knots.front().first;
  double prev_f = fn(prev_t, knots.front().second);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double f = fn(knots[i].first, knots[i].second);
    sum += 0.5 * (prev_f + f) * (knots[i].first - prev_t);
    prev_t = knots[i].first;
    prev_f = f;
  }
  return sum;
}

}  // namespace volterra
