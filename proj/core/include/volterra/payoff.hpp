#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace volterra {

/// Point where the first derivative jumps by `jump` (g'' carries jump * Dirac).
struct Kink {
  double location = 0.0;
  double jump = 0.0;
};

/// a sin(w x + phi).
struct TrigTerm {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

enum class PayoffKind { Call, Put, Identity, Power, Tabulated, Custom };

/// Terminal payoff g with derivatives of its smooth part and its kinks.
class Payoff {
 public:
  using Fn = std::function<double(double)>;

  Payoff(std::string name, Fn value, Fn first, Fn second, std::vector<Kink> kinks = {},
         PayoffKind kind = PayoffKind::Custom, double strike = 0.0);

  static Payoff call(double strike);
  static Payoff put(double strike);
  static Payoff identity();
  /// x^p for a non-negative integer p.
  static Payoff power(int p);
  /// Sum of sine terms: smooth and bounded with every derivative.
  static Payoff trigonometric(std::vector<TrigTerm> terms);
  /// Cubic (modified Akima) interpolation of (x, g) knots, linear beyond the table.
  static Payoff tabulated(std::vector<double> xs, std::vector<double> gs);
  static Payoff load_tabulated_csv(const std::filesystem::path& file);

  double operator()(double x) const { return value_(x); }
  double first(double x) const { return first_(x); }
  double second(double x) const { return second_(x); }
  const std::vector<Kink>& kinks() const noexcept { return kinks_; }
  const std::string& name() const noexcept { return name_; }
  PayoffKind kind() const noexcept { return kind_; }
  double strike() const noexcept { return strike_; }

  /// Same payoff with the smooth parts scaled and kinks kept.
  Payoff scaled(double factor) const;

 private:
  std::string name_;
  Fn value_, first_, second_;
  std::vector<Kink> kinks_;
  PayoffKind kind_;
  double strike_;
};

/// Running cost f(t, x) with its x-derivatives.
struct RunningCost {
  using Fn = std::function<double(double, double)>;
  Fn value;
  Fn dx;
  Fn dxx;

  bool is_zero() const noexcept { return !value; }
  double operator()(double t, double x) const { return value ? value(t, x) : 0.0; }

  static RunningCost zero() { return {}; }
  /// f(t, x) = x^2.
  static RunningCost square();
};

/// E[phi(x + sigma Z)], Z standard normal. Smooth integrands use 64-node
/// Gauss-Hermite; integrands with kinks use piecewise Gauss-Legendre in z
/// split at the kinks. Non-finite values or growth beyond 1e8 (1 + |y|^8)
/// raise EvaluationError.
double gaussian_expectation(const std::function<double(double)>& phi, double x, double sigma,
                            std::span<const double> kinks = {});

/// E[g''(x + sigma Z)] including the Dirac masses of g'' at kinks.
double gaussian_expectation_second(const Payoff& g, double x, double sigma);

/// Standard normal density and distribution function.
double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace volterra
