#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "volterra_cli/app.hpp"
#include "volterra_cli/catalog.hpp"
#include "volterra_cli/run_context.hpp"

namespace fs = std::filesystem;
using namespace volterra::cli;

namespace {

const fs::path kScenarios = VOLTERRA_SCENARIO_DIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "volterra");
  std::ostringstream out, err;
  Outcome o;
  o.code = run_cli(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("volterra_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json load(const fs::path& file) { return nlohmann::json::parse(slurp(file)); }

fs::path write_config(const std::string& name, const std::string& text) {
  const auto file = fs::temp_directory_path() / ("volterra_cli_test_" + name + ".json");
  std::ofstream(file) << text;
  return file;
}

fs::path write_config(const std::string& name, const nlohmann::json& doc) { return write_config(name, doc.dump(2)); }

/// Small Riemann-Liouville simulation used by several tests.
nlohmann::json small_simulation() {
  auto doc = load(kScenarios / "gaussian-paths.json");
  doc["paths"] = 300;
  doc["grid"]["steps"] = 32;
  doc.erase("thresholds");
  return doc;
}

}  // namespace

TEST(CliList, CatalogContainsReproductionScenarios) {
  const auto o = cli({"list"});
  EXPECT_EQ(o.code, 0);
  for (const char* name : {"linear-gaussian-mart", "singular-rate", "heston-hedge"})
    EXPECT_NE(o.out.find(name), std::string::npos) << name;
  // Every catalog entry ships a scenario for its command.
  for (const auto& e : scenario_catalog()) {
    const auto file = kScenarios / (e.name + ".json");
    ASSERT_TRUE(fs::exists(file)) << file;
    EXPECT_EQ(load(file)["command"], e.command) << e.name;
    EXPECT_EQ(load(file)["name"], e.name);
  }
}

TEST(CliList, FilterSelectsSubset) {
  const auto all = filter_catalog("");
  const auto heston = filter_catalog("heston");
  EXPECT_LT(heston.size(), all.size());
  ASSERT_FALSE(heston.empty());
  for (const auto& e : heston) EXPECT_NE(e.name.find("heston"), std::string::npos) << e.name;
  const auto o = cli({"list", "heston"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out.find("singular-rate"), std::string::npos);
}

TEST(CliList, UnknownFilterIsEmpty) {
  const auto o = cli({"list", "no-such-scenario"});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
}

TEST(CliRun, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CliRun, BrownianItoScenarioPassesWithManifest) {
  const auto dir = scratch("brownian_ito");
  const auto config = kScenarios / "brownian-ito.json";
  const auto o = cli({"verify-ito", "--config", config.string(), "--out", dir.string()});
  ASSERT_EQ(o.code, 0) << o.out << o.err;

  const auto report = load(dir / "report.json");
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_GE(report["results"]["order"]["slope"].get<double>(), 0.5);

  const auto manifest = load(dir / "manifest.json");
  EXPECT_EQ(manifest["seed"], load(config)["seed"]);
  EXPECT_EQ(manifest["config_sha256"], sha256_hex(slurp(config)));
  EXPECT_TRUE(manifest["versions"].contains("compiler"));
  std::set<std::string> listed;
  for (const auto& entry : manifest["outputs"]) {
    const auto file = dir / entry["file"].get<std::string>();
    const auto bytes = slurp(file);
    EXPECT_EQ(entry["sha256"], sha256_hex(bytes)) << file;
    EXPECT_EQ(entry["bytes"].get<std::size_t>(), bytes.size());
    listed.insert(entry["file"].get<std::string>());
  }
  for (const auto& f : fs::directory_iterator(dir))
    if (f.path().filename() != "manifest.json") EXPECT_TRUE(listed.count(f.path().filename().string())) << f.path();
}

TEST(CliRun, MalformedConfigExitsTwoWithoutOutputs) {
  const auto dir = scratch("malformed");
  const auto config = write_config("malformed", std::string("{\n  \"command\": \"simulate\",\n  \"seed\": 1,\n  oops\n}\n"));
  const auto o = cli({"simulate", "--config", config.string(), "--out", dir.string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("line 4"), std::string::npos) << o.err;
  EXPECT_FALSE(fs::exists(dir));
}

TEST(CliRun, UnknownKeyReportsFieldAndLine) {
  const auto dir = scratch("unknown_key");
  auto doc = small_simulation();
  doc["grid"]["stepz"] = 4;
  const auto config = write_config("unknown_key", doc);
  const auto o = cli({"simulate", "--config", config.string(), "--out", dir.string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("/grid/stepz"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("(line "), std::string::npos) << o.err;
  EXPECT_FALSE(fs::exists(dir));
}

TEST(CliRun, SchemaViolations) {
  const auto dir = scratch("schema");
  auto no_seed = small_simulation();
  no_seed.erase("seed");
  auto bad_hurst = small_simulation();
  bad_hurst["model"]["kernel"]["hurst"] = 1.5;
  auto wrong_type = small_simulation();
  wrong_type["paths"] = "many";
  for (const auto& [name, doc] : {std::pair{"no_seed", no_seed}, {"bad_hurst", bad_hurst}, {"wrong_type", wrong_type}}) {
    const auto config = write_config(name, doc);
    const auto o = cli({"simulate", "--config", config.string(), "--out", dir.string()});
    EXPECT_EQ(o.code, 2) << name;
    EXPECT_FALSE(fs::exists(dir)) << name;
  }
  // The subcommand must match the scenario.
  const auto config = write_config("mismatch", small_simulation());
  EXPECT_EQ(cli({"diagnose", "--config", config.string(), "--out", dir.string()}).code, 2);
  // Rebalancing counts that do not divide the grid are a schema error.
  auto hedge = load(kScenarios / "heston-hedge.json");
  hedge["rebalance_counts"] = {30};
  EXPECT_EQ(cli({"hedge", "--config", write_config("hedge", hedge).string(), "--out", dir.string()}).code, 2);
  EXPECT_FALSE(fs::exists(dir));
  // Unknown flags and missing configs.
  EXPECT_EQ(cli({"simulate", "--config", config.string(), "--bogus"}).code, 2);
  EXPECT_EQ(cli({"simulate"}).code, 2);
}

TEST(CliRun, NumericalFailureExitsThree) {
  const auto dir = scratch("numerical");
  auto doc = load(kScenarios / "bsde-discount.json");
  doc["paths"] = 3;
  doc["grid"]["steps"] = 4;
  doc["features"] = {{"degree", 4}};
  const auto o = cli({"solve-bsde", "--config", write_config("numerical", doc).string(), "--out", dir.string()});
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.err.find("module bsde"), std::string::npos) << o.err;
}

TEST(CliRun, ThresholdFailureExitsOneAndKeepsOutputs) {
  auto doc = small_simulation();
  doc["thresholds"] = {{"max_variance_relative_error", 1e-9}};
  const auto dir = scratch("threshold");
  const auto o = cli({"simulate", "--config", write_config("threshold", doc).string(), "--out", dir.string()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("FAIL"), std::string::npos);
  EXPECT_FALSE(load(dir / "report.json")["passed"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(CliRun, OutputDirectoryPrecedence) {
  auto doc = small_simulation();
  const auto from_config = scratch("dir_config");
  const auto from_env = scratch("dir_env");
  const auto from_flag = scratch("dir_flag");
  doc["output_dir"] = from_config.string();
  const auto config = write_config("dirs", doc).string();

  unsetenv("VOLTERRA_OUT_DIR");
  ASSERT_EQ(cli({"simulate", "--config", config}).code, 0);
  EXPECT_TRUE(fs::exists(from_config / "manifest.json"));

  setenv("VOLTERRA_OUT_DIR", from_env.c_str(), 1);
  ASSERT_EQ(cli({"simulate", "--config", config}).code, 0);
  EXPECT_TRUE(fs::exists(from_env / "manifest.json"));

  ASSERT_EQ(cli({"simulate", "--config", config, "--out", from_flag.string()}).code, 0);
  EXPECT_TRUE(fs::exists(from_flag / "manifest.json"));
  unsetenv("VOLTERRA_OUT_DIR");
}

TEST(CliRun, RerunsAreByteIdenticalAcrossThreadCounts) {
  const auto config = write_config("determinism", small_simulation()).string();
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "2", "8"}) {
    const auto dir = scratch(std::string("threads_") + threads);
    ASSERT_EQ(cli({"simulate", "--config", config, "--out", dir.string(), "--threads", threads}).code, 0);
    outputs.push_back(slurp(dir / "ensemble.csv") + slurp(dir / "summary.csv") + slurp(dir / "ensemble.bin"));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);

  const auto base = scratch("threads_1");
  ASSERT_EQ(cli({"simulate", "--config", config, "--out", base.string()}).code, 0);
  const auto dir = scratch("seed_override");
  ASSERT_EQ(cli({"simulate", "--config", config, "--out", dir.string(), "--seed-override", "7"}).code, 0);
  EXPECT_NE(slurp(dir / "ensemble.csv"), slurp(base / "ensemble.csv"));
  EXPECT_EQ(load(dir / "manifest.json")["seed"], 7);
}

TEST(CliRun, RoughHestonZeroVolOfVolMatchesBlackScholes) {
  auto doc = load(kScenarios / "heston-bs-oracle.json");
  doc["estimator"]["paths"] = 20000;
  const auto dir = scratch("heston_bs");
  const auto o = cli({"price", "--config", write_config("heston_bs", doc).string(), "--out", dir.string()});
  EXPECT_EQ(o.code, 0) << o.out << o.err;
  const auto report = load(dir / "report.json");
  const double reference = report["results"]["reference"]["value"];
  // Black-Scholes at the integrated variance read back from the report.
  const double iv = report["results"]["total_variance"];
  const double sd = std::sqrt(iv);
  const double d1 = 0.5 * sd, d2 = -0.5 * sd;
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  EXPECT_NEAR(reference, 100.0 * (cdf(d1) - cdf(d2)), 1e-10);
}
