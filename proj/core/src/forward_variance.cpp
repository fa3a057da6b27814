#include "volterra/forward_variance.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

void RelaxationParams::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("relaxation hurst must lie in (0, 1)");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("relaxation rate must be >= 0");
  if (!(level >= 0.0) || !std::isfinite(level)) throw ConfigError("relaxation level must be >= 0");
}

namespace {

void check_nodes(std::span<const double> nodes, std::size_t values) {
  if (nodes.empty() || nodes.size() != values) throw ConfigError("curve values must match the nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw ConfigError("curve nodes must be strictly increasing");
}

// Adds the two hat-function moments of one cell [a, b] seen from s_k.
void cell_weights(double sk, double a, double b, double beta, double& left, double& right) {
  const double h = b - a;
  const double up = sk - a, lo = sk - b;
  const double m0 = (std::pow(up, beta) - std::pow(lo, beta)) / beta;
  const double m1 = (std::pow(up, beta + 1) - std::pow(lo, beta + 1)) / (beta + 1);
  left = (m1 - lo * m0) / h;
  right = (up * m0 - m1) / h;
}

}  // namespace

ProductWeights::ProductWeights(std::span<const double> nodes, double beta) {
  if (!(beta > 0.0)) throw ConfigError("product weights need a positive exponent");
  const std::size_t n = nodes.size();
  values_.assign(n * (n + 1) / 2, 0.0);
  totals_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double* row = values_.data() + k * (k + 1) / 2;
    for (std::size_t m = 0; m < k; ++m) {
      double l = 0.0, r = 0.0;
      cell_weights(nodes[k], nodes[m], nodes[m + 1], beta, l, r);
      row[m] += l;
      row[m + 1] += r;
    }
    totals_[k] = std::pow(nodes[k] - nodes[0], beta) / beta;
  }
}

std::vector<double> theta_to_hat(std::span<const double> nodes, std::span<const double> theta,
                                 const RelaxationParams& p) {
  p.validate();
  check_nodes(nodes, theta.size());
  const double a = p.alpha();
  const double c = p.rate / std::tgamma(a);
  const ProductWeights w(nodes, a);
  std::vector<double> hat(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto row = w.row(k);
    double known = 0.0;
    for (std::size_t m = 0; m < k; ++m) known += row[m] * hat[m];
    hat[k] = (theta[k] + c * (p.level * w.total(k) - known)) / (1.0 + c * row[k]);
  }
  return hat;
}

std::vector<double> hat_to_theta(std::span<const double> nodes, std::span<const double> hat,
                                 const RelaxationParams& p) {
  p.validate();
  check_nodes(nodes, hat.size());
  const double a = p.alpha();
  const double c = p.rate / std::tgamma(a);
  const ProductWeights w(nodes, a);
  std::vector<double> theta(hat.size());
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const auto row = w.row(k);
    double integral = 0.0;
    for (std::size_t m = 0; m <= k; ++m) integral += row[m] * hat[m];
    theta[k] = hat[k] - c * (p.level * w.total(k) - integral);
  }
  return theta;
}

SeriesValue theta_to_hat_series(std::span<const double> nodes, std::span<const double> theta,
                                const RelaxationParams& p, std::size_t index) {
  p.validate();
  check_nodes(nodes, theta.size());
  if (index >= nodes.size()) throw DomainError("series index outside the curve");
  const double a = p.alpha();
  const double t = nodes[0];
  const double sk = nodes[index];
  const double lam = p.rate;
  const double span = sk - t;
  const double power_coeff = lam * p.level / std::tgamma(a + 1.0);

  SeriesValue out;
  out.value = theta[index] + power_coeff * std::pow(span, a);
  if (index == 0 || lam == 0.0) {
    out.converged = true;
    return out;
  }
  double sign_pow = 1.0;
  for (std::size_t n = 1; n <= 200; ++n) {
    const double b = static_cast<double>(n) * a;
    sign_pow *= -lam;
    double acc = 0.0;
    for (std::size_t m = 0; m < index; ++m) {
      double l = 0.0, r = 0.0;
      cell_weights(sk, nodes[m], nodes[m + 1], b, l, r);
      acc += l * theta[m] + r * theta[m + 1];
    }
    // int_t^s (s - r)^(b - 1) (r - t)^a dr = B(b, a + 1) (s - t)^(a + b)
    acc += power_coeff * std::exp(std::lgamma(b) + std::lgamma(a + 1) - std::lgamma(a + b + 1)) *
           std::pow(span, a + b);
    const double term = sign_pow / std::tgamma(b) * acc;
    out.value += term;
    out.terms = n;
    if (!std::isfinite(out.value)) break;
    if (std::abs(term) < 1e-14 * std::abs(out.value)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<double> theta_to_hat_checked(std::span<const double> nodes, std::span<const double> theta,
                                         const RelaxationParams& p, std::span<const std::size_t> check_indices,
                                         double tolerance) {
  auto hat = theta_to_hat(nodes, theta, p);
  for (std::size_t k : check_indices) {
    if (k >= nodes.size()) throw DomainError("check index outside the curve");
    if (p.rate * std::pow(nodes[k] - nodes[0], p.alpha()) > kSeriesCrossover) continue;
    const auto s = theta_to_hat_series(nodes, theta, p, k);
    const double scale = std::max(std::abs(s.value), 1e-300);
    if (!s.converged || std::abs(hat[k] - s.value) > tolerance * scale)
      throw TransformError("forward-variance grid and series disagree at node " + std::to_string(k), hat[k],
                           s.value);
  }
  return hat;
}

std::vector<double> graded_nodes(double t, double horizon, std::size_t m, double grade) {
  if (!(horizon > t) || m == 0 || !(grade >= 1.0)) throw ConfigError("graded nodes need T > t, m > 0, grade >= 1");
  std::vector<double> out(m + 1);
  for (std::size_t k = 0; k <= m; ++k)
    out[k] = t + (horizon - t) * std::pow(static_cast<double>(k) / static_cast<double>(m), grade);
  out.back() = horizon;
  return out;
}

}  // namespace volterra
