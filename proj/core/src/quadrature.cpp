#include "volterra/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "volterra/errors.hpp"

namespace volterra {
namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
GaussRule golub_welsch(std::size_t n, double mu0, const std::function<double(std::size_t)>& beta) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    jacobi(i, i - 1) = jacobi(i - 1, i) = beta(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    rule.nodes[k] = solver.eigenvalues()(i);
    const double v = solver.eigenvectors()(0, i);
    rule.weights[k] = mu0 * v * v;
  }
  return rule;
}

const GaussRule& cached(std::map<std::size_t, GaussRule>& cache, std::mutex& guard, std::size_t n,
                        const std::function<GaussRule(std::size_t)>& build) {
  if (n == 0) throw ConfigError("quadrature order must be positive");
  std::lock_guard lock(guard);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t order) {
  static std::map<std::size_t, GaussRule> cache;
  static std::mutex guard;
  return cached(cache, guard, order, [](std::size_t n) {
    return golub_welsch(n, 2.0, [](std::size_t k) {
      const double kk = static_cast<double>(k);
      return kk / std::sqrt(4.0 * kk * kk - 1.0);
    });
  });
}

const GaussRule& gauss_hermite(std::size_t order) {
  static std::map<std::size_t, GaussRule> cache;
  static std::mutex guard;
  return cached(cache, guard, order, [](std::size_t n) {
    return golub_welsch(n, 1.0, [](std::size_t k) { return std::sqrt(static_cast<double>(k)); });
  });
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, std::size_t order) {
  const auto& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return sum * half;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double tolerance) {
  QuadratureResult out;
  if (b <= a) return out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tolerance, &out.error, &l1);
  out.error = std::max(out.error * std::max(1.0, l1), 0.0);
  return out;
}

QuadratureResult integrate_right_singular(const std::function<double(double)>& f, double a, double b,
                                          double tolerance) {
  QuadratureResult out;
  if (b <= a) return out;
  double split = a + 0.5 * (b - a);
  auto first = integrate_adaptive(f, a, split, tolerance);
  out.value = first.value;
  out.error = first.error;
  double previous = first.value;
  double previous_ratio = -1.0;
  for (int level = 0; level < 400; ++level) {
    const double hi = b - 0.5 * (b - split);
    const auto piece = integrate_adaptive(f, split, hi, tolerance);
    out.value += piece.value;
    out.error += piece.error;
    split = hi;
    // Pieces of a power-law singularity shrink geometrically. Once the ratio
    // has settled the remaining pieces are summed as a geometric series.
    const double ratio = previous != 0.0 ? std::abs(piece.value / previous) : 0.0;
    previous = piece.value;
    if (ratio < 1.0) {
      const double tail = piece.value * ratio / (1.0 - ratio);
      const bool settled = level >= 3 && std::abs(ratio - previous_ratio) < 1e-6;
      if (std::abs(tail) < 0.1 * tolerance || settled) {
        out.value += settled ? tail : 0.0;
        out.error += settled ? std::abs(tail) * 1e-6 : std::abs(tail);
        return out;
      }
    }
    previous_ratio = ratio;
    if (b - split <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) break;
  }
  out.error += std::abs(previous);
  return out;
}

double integrate_left_power(const std::function<double(double)>& h, double a, double b, double gamma,
                            std::size_t order) {
  if (!(gamma > -1.0)) throw DomainError("power singularity must be integrable");
  if (b <= a) return 0.0;
  double sum = 0.0;
  double hi = b;
  // Geometric panels down to a gap where the frozen-h remainder is negligible;
  // the floor keeps evaluation points well clear of kMinKernelGap-type limits.
  const double floor_gap = std::max(1e-9 * (b - a), 1e-11);
  while (hi - a > floor_gap) {
    const double lo = a + 0.5 * (hi - a);
    sum += integrate_gl([&](double s) { return h(s) * std::pow(s - a, gamma); }, lo, hi, order);
    hi = lo;
  }
  // Innermost piece [a, hi]: h is frozen at the midpoint and the power is integrated exactly.
  sum += h(a + 0.5 * (hi - a)) * std::pow(hi - a, gamma + 1.0) / (gamma + 1.0);
  return sum;
}

}  // namespace volterra
