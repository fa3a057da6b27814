#include "volterra/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

std::span<const double> PathView::state(std::size_t j) const {
  if (j > step_) throw DomainError("coefficient read the path after the current time");
  return states_.subspan(j * dim_, dim_);
}

void CoefficientSpec::local_drift(double s, const PathView& past, std::span<double> out) const {
  if (drift) {
    drift(s, past, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
}

void CoefficientSpec::local_diffusion(double s, const PathView& past, std::span<double> out) const {
  if (diffusion) {
    diffusion(s, past, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < std::min(dim_state, dim_noise); ++c) out[c * dim_noise + c] = 1.0;
}

std::vector<double> CoefficientSpec::drift_at(double t, double s, const PathView& past) const {
  std::vector<double> out(dim_state);
  local_drift(s, past, out);
  const double k = drift_kernel(t, s);
  for (double& v : out) v *= k;
  return out;
}

std::vector<double> CoefficientSpec::diffusion_at(double t, double s, const PathView& past) const {
  std::vector<double> out(dim_state * dim_noise);
  local_diffusion(s, past, out);
  const double k = diffusion_kernel(t, s);
  for (double& v : out) v *= k;
  return out;
}

CoefficientSpec CoefficientSpec::truncated(double delta) const {
  CoefficientSpec c = *this;
  c.drift_kernel = drift_kernel.truncated(delta);
  c.diffusion_kernel = diffusion_kernel.truncated(delta);
  return c;
}

CoefficientSpec CoefficientSpec::gaussian(const KernelSpec& kernel, double x0) {
  CoefficientSpec c;
  c.initial = {x0};
  c.drift_kernel = kernel;
  c.diffusion_kernel = kernel;
  return c;
}

CoefficientSpec CoefficientSpec::brownian(double x0) { return gaussian(KernelSpec::constant(), x0); }

void CoefficientSpec::validate() const {
  if (dim_state == 0 || dim_noise == 0) throw ConfigError("coefficient dimensions must be positive");
  if (initial.size() != dim_state) throw ConfigError("initial condition does not match dim_state");
  if (!diffusion && dim_state != dim_noise)
    throw ConfigError("default diffusion needs dim_state == dim_noise");
}

double growth_ratio(const CoefficientSpec& coeff, const PathView& past, std::span<const double> eval_times,
                    double kappa) {
  const double s = past.time();
  double norm = 0.0;
  for (std::size_t j = 0; j <= past.step(); ++j)
    for (double v : past.state(j)) norm = std::max(norm, std::abs(v));
  const double scale = 1.0 + std::pow(norm, kappa);
  double worst = 0.0;
  for (double t : eval_times) {
    if (!(t > s)) continue;
    const double gap = std::pow(t - s, coeff.hurst() - 0.5);
    for (double v : coeff.drift_at(t, s, past)) worst = std::max(worst, std::abs(v) / (scale * gap));
    for (double v : coeff.diffusion_at(t, s, past)) worst = std::max(worst, std::abs(v) / (scale * gap));
  }
  return worst;
}

}  // namespace volterra
