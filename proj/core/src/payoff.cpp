#include "volterra/payoff.hpp"

#include <boost/math/interpolators/makima.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "volterra/errors.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {
namespace {

constexpr std::size_t kHermiteOrder = 64;
constexpr double kTailCut = 12.0;
constexpr double kGrowthConstant = 1e8;

double guarded(const std::function<double(double)>& phi, double y) {
  const double v = phi(y);
  if (!std::isfinite(v)) throw EvaluationError("integrand is not finite at y = " + std::to_string(y));
  const double y2 = y * y;
  if (std::abs(v) > kGrowthConstant * (1.0 + y2 * y2 * y2 * y2))
    throw EvaluationError("integrand grows faster than the polynomial guard at y = " + std::to_string(y));
  return v;
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Payoff::Payoff(std::string name, Fn value, Fn first, Fn second, std::vector<Kink> kinks, PayoffKind kind,
               double strike)
    : name_(std::move(name)),
      value_(std::move(value)),
      first_(std::move(first)),
      second_(std::move(second)),
      kinks_(std::move(kinks)),
      kind_(kind),
      strike_(strike) {
  if (!value_ || !first_ || !second_) throw ConfigError("payoff " + name_ + " needs value and two derivatives");
}

Payoff Payoff::call(double strike) {
  return Payoff(
      "call", [strike](double x) { return std::max(x - strike, 0.0); },
      [strike](double x) { return x > strike ? 1.0 : 0.0; }, [](double) { return 0.0; }, {{strike, 1.0}},
      PayoffKind::Call, strike);
}

Payoff Payoff::put(double strike) {
  return Payoff(
      "put", [strike](double x) { return std::max(strike - x, 0.0); },
      [strike](double x) { return x < strike ? -1.0 : 0.0; }, [](double) { return 0.0; }, {{strike, 1.0}},
      PayoffKind::Put, strike);
}

Payoff Payoff::identity() {
  return Payoff(
      "identity", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }, {},
      PayoffKind::Identity);
}

Payoff Payoff::power(int p) {
  if (p < 0) throw ConfigError("power payoff needs a non-negative exponent");
  const double q = p;
  return Payoff(
      "power", [p](double x) { return std::pow(x, p); },
      [p, q](double x) { return p >= 1 ? q * std::pow(x, p - 1) : 0.0; },
      [p, q](double x) { return p >= 2 ? q * (q - 1.0) * std::pow(x, p - 2) : 0.0; }, {}, PayoffKind::Power, q);
}

Payoff Payoff::trigonometric(std::vector<TrigTerm> terms) {
  if (terms.empty()) throw ConfigError("trigonometric payoff needs at least one term");
  for (const auto& t : terms)
    if (!std::isfinite(t.amplitude) || !std::isfinite(t.frequency) || !std::isfinite(t.phase))
      throw ConfigError("trigonometric payoff terms must be finite");
  auto shared = std::make_shared<const std::vector<TrigTerm>>(std::move(terms));
  auto sum = [shared](int order) {
    return [shared, order](double x) {
      double v = 0.0;
      for (const auto& t : *shared) {
        const double arg = t.frequency * x + t.phase;
        const double w = std::pow(t.frequency, order);
        switch (order) {
          case 0: v += t.amplitude * std::sin(arg); break;
          case 1: v += t.amplitude * w * std::cos(arg); break;
          default: v -= t.amplitude * w * std::sin(arg); break;
        }
      }
      return v;
    };
  };
  return Payoff("trigonometric", sum(0), sum(1), sum(2));
}

Payoff Payoff::tabulated(std::vector<double> xs, std::vector<double> gs) {
  if (xs.size() != gs.size() || xs.size() < 4) throw ConfigError("tabulated payoff needs at least four knots");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ConfigError("tabulated payoff knots must increase");
  const double x0 = xs.front(), x1 = xs.back();
  const double g0 = gs.front(), g1 = gs.back();
  auto spline = std::make_shared<boost::math::interpolators::makima<std::vector<double>>>(std::move(xs), std::move(gs));
  const double s0 = spline->prime(x0), s1 = spline->prime(x1);
  auto value = [=](double x) {
    if (x <= x0) return g0 + s0 * (x - x0);
    if (x >= x1) return g1 + s1 * (x - x1);
    return (*spline)(x);
  };
  auto first = [=](double x) {
    if (x <= x0) return s0;
    if (x >= x1) return s1;
    return spline->prime(x);
  };
  // The interpolant is C^1; its second derivative is taken by central
  // differences of the exact first derivative.
  auto second = [=](double x) {
    if (x <= x0 || x >= x1) return 0.0;
    const double h = 1e-5 * std::max(1.0, x1 - x0);
    const double lo = std::max(x0, x - h), hi = std::min(x1, x + h);
    return (first(hi) - first(lo)) / (hi - lo);
  };
  return Payoff("tabulated", value, first, second, {}, PayoffKind::Tabulated);
}

Payoff Payoff::load_tabulated_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open payoff table " + file.string());
  std::vector<double> xs, gs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x = 0.0, g = 0.0;
    if (!(fields >> x >> g)) {
      if (xs.empty() && line_no == 1) continue;
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    xs.push_back(x);
    gs.push_back(g);
  }
  return tabulated(std::move(xs), std::move(gs));
}

Payoff Payoff::scaled(double factor) const {
  std::vector<Kink> k = kinks_;
  for (auto& kink : k) kink.jump *= factor;
  return Payoff(
      name_, [v = value_, factor](double x) { return factor * v(x); },
      [d = first_, factor](double x) { return factor * d(x); },
      [d = second_, factor](double x) { return factor * d(x); }, std::move(k), PayoffKind::Custom, strike_);
}

RunningCost RunningCost::square() {
  return {[](double, double x) { return x * x; }, [](double, double x) { return 2.0 * x; },
          [](double, double) { return 2.0; }};
}

double gaussian_expectation(const std::function<double(double)>& phi, double x, double sigma,
                            std::span<const double> kinks) {
  if (!std::isfinite(x) || !std::isfinite(sigma)) throw EvaluationError("non-finite Gaussian expectation input");
  if (sigma <= 0.0) return guarded(phi, x);
  std::vector<double> cuts;
  for (double k : kinks) {
    const double z = (k - x) / sigma;
    if (z > -kTailCut && z < kTailCut) cuts.push_back(z);
  }
  if (cuts.empty() && kinks.empty()) {
    const auto& rule = gauss_hermite(kHermiteOrder);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * guarded(phi, x + sigma * rule.nodes[i]);
    return sum;
  }
  // Unit panels on [-12, 12] with the kinks added as panel boundaries.
  for (int z = -static_cast<int>(kTailCut); z <= static_cast<int>(kTailCut); ++z) cuts.push_back(z);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto& rule = gauss_legendre(20);
  double sum = 0.0;
  for (std::size_t p = 1; p < cuts.size(); ++p) {
    const double a = cuts[p - 1], b = cuts[p];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    if (half <= 0.0) continue;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = mid + half * rule.nodes[i];
      panel += rule.weights[i] * guarded(phi, x + sigma * z) * normal_pdf(z);
    }
    sum += panel * half;
  }
  return sum;
}

double gaussian_expectation_second(const Payoff& g, double x, double sigma) {
  std::vector<double> where;
  for (const auto& k : g.kinks()) where.push_back(k.location);
  double out = gaussian_expectation([&](double y) { return g.second(y); }, x, sigma, where);
  if (sigma > 0.0)
    for (const auto& k : g.kinks()) out += k.jump * normal_pdf((k.location - x) / sigma) / sigma;
  return out;
}

}  // namespace volterra
