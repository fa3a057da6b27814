#include "volterra_cli/catalog.hpp"

#include <algorithm>
#include <cctype>

namespace volterra::cli {

const std::vector<CatalogEntry>& scenario_catalog() {
  static const std::vector<CatalogEntry> catalog{
      {"linear-gaussian-mart", "solve-linear",
       "conditional-expectation functional against nested Monte Carlo, and its martingale drift (H = 0.3)", {1, 2}},
      {"gauss-ito", "verify-ito", "functional Ito telescoping order for the Gaussian functional (H = 0.7)", {3}},
      {"brownian-ito", "verify-ito", "classical Ito formula for W^2 on Brownian paths", {3}},
      {"singular-rate", "solve-linear", "convergence rate of the truncated diffusion pairing (H = 0.3)", {4}},
      {"ppde-residual", "solve-linear", "linear PPDE residual at random points with closed-form derivatives (H = 0.3)",
       {5}},
      {"ppde-residual-fd", "solve-linear", "linear PPDE residual with finite-difference derivatives (H = 0.3)", {5}},
      {"brownian-scalings", "diagnose", "two-time and freezing scaling slopes for Brownian motion", {6}},
      {"rough-scalings", "diagnose", "two-time and freezing scaling slopes for a rough kernel (H = 0.3)", {6}},
      {"bsde-reduction", "solve-bsde", "zero-driver BSDE against the Gaussian value and a Feynman-Kac control", {7}},
      {"bsde-discount", "solve-bsde", "discounting driver against the discounted Black-Scholes price", {7}},
      {"heston-bs-oracle", "price", "rough Heston with nu = 0 against Black-Scholes", {9}},
      {"heston-mixing", "price", "rough Heston with rho = 0: mixing estimator against full Monte Carlo", {9}},
      {"heston-hedge", "hedge", "hedging P&L of a call under rough Heston, stock and forward-variance legs", {10}},
      {"bergomi-black-scholes", "price", "rough Bergomi with zero vol-of-vol against Black-Scholes", {11}},
      {"gaussian-paths", "simulate", "Riemann-Liouville paths with exact column variances", {12}},
  };
  return catalog;
}

std::vector<CatalogEntry> filter_catalog(const std::string& filter) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  const std::string needle = lower(filter);
  std::vector<CatalogEntry> out;
  for (const auto& e : scenario_catalog()) {
    if (needle.empty() || lower(e.name).find(needle) != std::string::npos ||
        lower(e.command).find(needle) != std::string::npos || lower(e.checks).find(needle) != std::string::npos)
      out.push_back(e);
  }
  return out;
}

}  // namespace volterra::cli
