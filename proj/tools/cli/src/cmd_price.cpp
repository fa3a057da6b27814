#include <cmath>

#include "volterra/rng.hpp"
#include "volterra/roughvol.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

enum class OracleKind { BlackScholes, FullMonteCarlo, Conditional };

PricingMethod parse_method(const Node& n, const std::string& key, const std::string& fallback) {
  return n.choice(key, {"conditional", "full-monte-carlo"}, fallback) == "conditional" ? PricingMethod::Conditional
                                                                                         : PricingMethod::FullMonteCarlo;
}

const char* method_name(PricingMethod m) {
  return m == PricingMethod::Conditional ? "conditional" : "full-monte-carlo";
}

/// Integrated variance of a model whose variance is deterministic, from the
/// forward-variance curve at time zero.
double deterministic_total_variance(const VolatilityModel& model, const VolModelConfig& cfg, std::uint64_t seed) {
  if (const auto* b = std::get_if<RoughBergomiParams>(&cfg.params)) return b->v0 * model.grid().horizon();
  const auto ens = model.simulate(1, seed);
  const auto curve = heston_theta(ens, std::get<RoughHestonParams>(cfg.params), 0, 0);
  double iv = 0.0;
  for (std::size_t j = 1; j < curve.horizons.size(); ++j)
    iv += 0.5 * (curve.horizons[j] - curve.horizons[j - 1]) * (curve.hat_values[j] + curve.hat_values[j - 1]);
  return iv;
}

}  // namespace

Job parse_price(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const auto model_node = root.child("model");
  const VolModelConfig model_cfg = parse_vol_model(model_node);
  const Claim claim = parse_claim(root.child("claim"), pctx);

  const auto est_node = root.child("estimator");
  PricingConfig est;
  est.method = parse_method(est_node, "method", "conditional");
  est.n_paths = est_node.count("paths");
  if (est.n_paths < 2) est_node.fail("paths", "need at least two paths");
  if (est.method == PricingMethod::Conditional && !claim.running.is_zero())
    est_node.fail("method", "the conditional estimator needs a zero running cost");
  est_node.finish();

  const auto oracle_node = root.child("oracle");
  const auto otype = oracle_node.choice("type", {"black-scholes", "full-monte-carlo", "conditional"});
  OracleKind oracle = OracleKind::BlackScholes;
  PricingConfig ocfg;
  if (otype == "black-scholes") {
    const bool deterministic = std::visit(
        [](const auto& p) { return p.vol_of_vol == 0.0; }, model_cfg.params);
    if (!deterministic) model_node.fail("vol_of_vol", "the Black-Scholes oracle needs vol_of_vol = 0");
    if (!claim.running.is_zero()) oracle_node.fail("type", "the Black-Scholes oracle needs a zero running cost");
  } else {
    oracle = otype == "conditional" ? OracleKind::Conditional : OracleKind::FullMonteCarlo;
    ocfg.method = oracle == OracleKind::Conditional ? PricingMethod::Conditional : PricingMethod::FullMonteCarlo;
    ocfg.n_paths = oracle_node.count("paths");
    if (ocfg.n_paths < 2) oracle_node.fail("paths", "need at least two paths");
    if (ocfg.method == PricingMethod::Conditional && !claim.running.is_zero())
      oracle_node.fail("type", "the conditional estimator needs a zero running cost");
  }
  oracle_node.finish();
  const auto th = parse_thresholds(root, {"se_multiple", "relative_floor", "max_std_error"});

  return [=](RunContext& ctx) {
    const auto model = in_module("roughvol", [&] { return model_cfg.build(grid); });
    const auto anchor = model.simulate(1, mix_seed(ctx.seed(), 1));
    const auto row = model.theta_row(anchor, 0, 0);

    PricingConfig cfg = est;
    cfg.seed = mix_seed(ctx.seed(), 2);
    const auto price = in_module("roughvol", [&] { return price_claim(model, claim, 0, model.s0(), row, cfg); });

    double reference = 0.0, reference_se = 0.0;
    CsvTable csv({"estimator", "price", "std_error", "paths"});
    csv.row() << method_name(cfg.method) << price.price << price.std_error << price.paths;
    if (oracle == OracleKind::BlackScholes) {
      const double iv = in_module("forward_variance", [&] { return deterministic_total_variance(model, model_cfg, ctx.seed()); });
      reference = lognormal_expectation(claim.terminal, model.s0(), iv);
      csv.row() << "black-scholes" << reference << 0.0 << std::size_t{0};
      ctx.report()["total_variance"] = iv;
    } else {
      PricingConfig oc = ocfg;
      oc.seed = mix_seed(ctx.seed(), 3);
      const auto o = in_module("roughvol", [&] { return price_claim(model, claim, 0, model.s0(), row, oc); });
      reference = o.price;
      reference_se = o.std_error;
      csv.row() << method_name(oc.method) << o.price << o.std_error << o.paths;
    }
    ctx.add_csv("price.csv", csv);

    const double se = std::hypot(price.std_error, reference_se);
    const double error = std::abs(price.price - reference);
    auto& r = ctx.report();
    r["model"] = model_cfg.type();
    r["price"] = {{"value", price.price}, {"std_error", price.std_error}, {"method", method_name(cfg.method)}};
    r["reference"] = {{"value", reference}, {"std_error", reference_se}};
    r["abs_error"] = error;
    r["combined_std_error"] = se;
    if (th.get("se_multiple") || th.get("relative_floor")) {
      const double band = th.get("se_multiple").value_or(0.0) * se + th.get("relative_floor").value_or(0.0) * std::abs(reference);
      r["band"] = band;
      ctx.check_at_most("abs_error", error, band);
    }
    check_max(ctx, "std_error", price.std_error, th.get("max_std_error"));
  };
}

}  // namespace volterra::cli
