#include "volterra_cli/app.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra_cli/catalog.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

std::optional<std::string> read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

}  // namespace

int run_scenario(const RunRequest& request, std::ostream& out, std::ostream& err) {
  const auto text = read_text(request.config);
  if (!text) {
    err << "error: cannot read config " << request.config << "\n";
    return kExitSchemaError;
  }

  Job job;
  std::string name;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  try {
    const Document doc = Document::parse(*text);
    const Node root(doc, doc.root(), "");
    std::vector<std::string> names;
    for (const auto& c : command_table()) names.push_back(c.name);
    const auto command = root.choice("command", names);
    if (command != request.command)
      root.fail("command", "scenario is for \"" + command + "\", not \"" + request.command + "\"");
    name = root.text("name");
    root.text("description", "");
    seed = root.count("seed");
    const auto configured_dir = root.text("output_dir", "");
    ParseContext pctx{request.config.parent_path()};
    job = find_command(command)->parse(root, pctx);
    root.finish();

    if (request.out_dir)
      out_dir = *request.out_dir;
    else if (const char* env = std::getenv("VOLTERRA_OUT_DIR"); env && *env)
      out_dir = env;
    else if (!configured_dir.empty())
      out_dir = configured_dir;
    else
      out_dir = std::filesystem::path("volterra-out") / name;
  } catch (const SchemaError& e) {
    err << "schema error in " << request.config.string() << " at " << e.field();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << ": " << e.what() << "\n";
    return kExitSchemaError;
  }
  if (request.seed_override) seed = *request.seed_override;

  std::optional<ThreadCountGuard> threads;
  if (request.threads) threads.emplace(*request.threads);

  RunContext ctx(request.command, seed);
  try {
    job(ctx);
  } catch (const ModuleFailure& e) {
    err << "numerical failure in module " << e.module() << ": " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const ConfigError& e) {
    err << "configuration rejected while running: " << e.what() << "\n";
    return kExitSchemaError;
  }

  try {
    ctx.write(out_dir, {name, *text, request.config, thread_count()});
  } catch (const std::exception& e) {
    err << "error: cannot write outputs to " << out_dir.string() << ": " << e.what() << "\n";
    return kExitIoError;
  }

  for (const auto& t : ctx.thresholds())
    out << (t.passed ? "pass  " : "FAIL  ") << t.name << ": " << t.observed << " " << t.relation << " " << t.bound
        << "\n";
  out << name << ": " << (ctx.passed() ? "passed" : "threshold failure") << ", outputs in " << out_dir.string()
      << "\n";
  return ctx.passed() ? kExitPass : kExitThresholdFailed;
}

int list_scenarios(const std::string& filter, std::ostream& out) {
  for (const auto& e : filter_catalog(filter))
    out << e.name << "\t" << e.command << "\tcriteria " << join(e.criteria) << "\t" << e.checks << "\n";
  return kExitPass;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volterra process toolkit: scenario runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(VOLTERRA_CLI_VERSION));

  RunRequest request;
  std::string config, out_dir;
  std::size_t threads = 0;
  std::uint64_t seed_override = 0;
  for (const auto& info : command_table()) {
    auto* sub = app.add_subcommand(info.name, info.summary);
    sub->add_option("--config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides VOLTERRA_OUT_DIR and the config)");
    sub->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed_override, "replace the scenario seed");
  }
  std::string filter;
  auto* list = app.add_subcommand("list", "print the shipped reproduction scenarios");
  list->add_option("filter", filter, "substring of the name, command or description");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitSchemaError;
  }

  if (list->parsed()) return list_scenarios(filter, out);
  for (const auto* sub : app.get_subcommands()) {
    request.command = sub->get_name();
    request.config = config;
    if (sub->count("--out")) request.out_dir = out_dir;
    if (sub->count("--threads")) request.threads = threads;
    if (sub->count("--seed-override")) request.seed_override = seed_override;
  }
  return run_scenario(request, out, err);
}

}  // namespace volterra::cli
