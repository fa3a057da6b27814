#include "volterra_cli/models.hpp"

#include <cmath>

#include "volterra/errors.hpp"

namespace volterra::cli {
namespace {

std::filesystem::path resolve(const ParseContext& ctx, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() ? p : ctx.base_dir / p;
}

/// Library constructors validate their own arguments; their complaints are
/// schema errors of the node being parsed.
template <class F>
auto guarded(const Node& node, const std::string& key, F&& make) {
  try {
    return make();
  } catch (const ConfigError& e) {
    node.fail(key, e.what());
  } catch (const DomainError& e) {
    node.fail(key, e.what());
  }
}

}  // namespace

TimeGrid parse_grid(const Node& node) {
  const double horizon = node.positive("horizon");
  const auto steps = node.count("steps");
  node.finish();
  if (steps == 0) node.fail("steps", "grid needs at least one step");
  return TimeGrid(horizon, steps);
}

KernelSpec parse_kernel(const Node& node, const ParseContext& ctx) {
  const auto family = node.choice("family", {"riemann-liouville", "constant", "tabulated"});
  KernelSpec k;
  if (family == "riemann-liouville") {
    const double h = node.number("hurst");
    const double norm = node.positive("normalization", 1.0);
    k = guarded(node, "hurst", [&] { return KernelSpec::riemann_liouville(h, norm); });
  } else if (family == "constant") {
    const double norm = node.positive("normalization", 1.0);
    k = KernelSpec::constant(norm);
  } else {
    const double h = node.number("hurst");
    const auto file = resolve(ctx, node.text("file"));
    k = guarded(node, "file", [&] { return KernelSpec::load_gap_csv(h, file); });
  }
  node.finish();
  return k;
}

Payoff parse_payoff(const Node& node, const ParseContext& ctx) {
  const auto type = node.choice("type", {"call", "put", "identity", "power", "tabulated", "trigonometric"});
  Payoff g = Payoff::identity();
  if (type == "call") {
    g = Payoff::call(node.number("strike"));
  } else if (type == "put") {
    g = Payoff::put(node.number("strike"));
  } else if (type == "power") {
    const auto p = node.count("exponent");
    g = guarded(node, "exponent", [&] { return Payoff::power(static_cast<int>(p)); });
  } else if (type == "tabulated") {
    const auto file = resolve(ctx, node.text("file"));
    g = guarded(node, "file", [&] { return Payoff::load_tabulated_csv(file); });
  } else if (type == "trigonometric") {
    std::vector<TrigTerm> terms;
    for (const auto& t : node.children("terms")) {
      terms.push_back({t.number("amplitude"), t.number("frequency"), t.number("phase", 0.0)});
      t.finish();
    }
    g = guarded(node, "terms", [&] { return Payoff::trigonometric(terms); });
  }
  node.finish();
  return g;
}

RunningCost parse_running(const Node& parent, const std::string& key) {
  const auto name = parent.choice(key, {"zero", "square"}, "zero");
  return name == "square" ? RunningCost::square() : RunningCost::zero();
}

ProcessModel parse_process(const Node& node, const ParseContext& ctx) {
  ProcessModel m;
  m.type = node.choice("type", {"gaussian", "brownian", "lognormal"});
  if (m.type == "gaussian") {
    m.kernel = parse_kernel(node.child("kernel"), ctx);
    m.x0 = node.number("x0", 0.0);
    m.coeff = CoefficientSpec::gaussian(m.kernel, m.x0);
  } else if (m.type == "brownian") {
    m.kernel = KernelSpec::constant();
    m.x0 = node.number("x0", 0.0);
    m.coeff = CoefficientSpec::brownian(m.x0);
  } else {
    m.x0 = node.positive("s0");
    const double sigma = m.sigma = node.positive("sigma");
    m.kernel = KernelSpec::constant();
    m.coeff = CoefficientSpec::brownian(m.x0);
    m.coeff.diffusion = [sigma](double, const PathView& v, std::span<double> out) { out[0] = sigma * v.current()[0]; };
  }
  node.finish();
  return m;
}

RoughHestonParams parse_heston(const Node& node) {
  RoughHestonParams p;
  p.s0 = node.positive("s0", p.s0);
  p.v0 = node.positive("v0", p.v0);
  p.hurst = node.positive("hurst", p.hurst);
  p.mean_rev_rate = node.number("mean_reversion_rate", p.mean_rev_rate);
  p.mean_rev_level = node.number("mean_reversion_level", p.mean_rev_level);
  p.vol_of_vol = node.number("vol_of_vol", p.vol_of_vol);
  p.correlation = node.number("correlation", p.correlation);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    node.fail("", e.what());
  }
  return p;
}

RoughBergomiParams parse_bergomi(const Node& node) {
  RoughBergomiParams p;
  p.s0 = node.positive("s0", p.s0);
  p.v0 = node.positive("v0", p.v0);
  p.hurst = node.positive("hurst", p.hurst);
  p.vol_of_vol = node.number("vol_of_vol", p.vol_of_vol);
  p.correlation = node.number("correlation", p.correlation);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    node.fail("", e.what());
  }
  return p;
}

VolatilityModel VolModelConfig::build(const TimeGrid& grid) const {
  if (const auto* h = std::get_if<RoughHestonParams>(&params)) return VolatilityModel::heston(*h, grid);
  return VolatilityModel::bergomi(std::get<RoughBergomiParams>(params), grid);
}

std::string VolModelConfig::type() const {
  return std::holds_alternative<RoughHestonParams>(params) ? "rough-heston" : "rough-bergomi";
}

VolModelConfig parse_vol_model(const Node& node) {
  const auto type = node.choice("type", {"rough-heston", "rough-bergomi"});
  VolModelConfig cfg;
  if (type == "rough-heston")
    cfg.params = parse_heston(node);
  else
    cfg.params = parse_bergomi(node);
  node.finish();
  return cfg;
}

Claim parse_claim(const Node& node, const ParseContext& ctx) {
  Claim c;
  c.terminal = parse_payoff(node.child("payoff"), ctx);
  c.running = parse_running(node, "running");
  node.finish();
  return c;
}

}  // namespace volterra::cli
