#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace visconv::workbench;

int main(int argc, char** argv) {
  CLI::App app{"Viscosity recovery workbench for 2D periodic Navier-Stokes data"};
  app.require_subcommand(0, 1);
  std::string config_path;
  std::string observations;
  std::string truth;
  int jobs = 1;
  bool strict = false;
  bool print_config = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_flag("--strict", strict, "treat failed sufficiency conditions as errors");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  auto* simulate = app.add_subcommand("simulate", "truth run; writes truth and observation files");
  auto* observe = app.add_subcommand("observe", "truncate a truth file to the observed modes");
  observe->add_option("--truth", truth, "truth trajectory (default: output.truth)");
  auto* recover = app.add_subcommand("recover", "viscosity recovery; writes recovery CSV and bounds JSON");
  auto* scan = app.add_subcommand("loss-scan", "L(gamma) over a grid; writes CSV");
  auto* verify = app.add_subcommand("verify", "bounds and sufficiency conditions; writes JSON");
  for (auto* sub : {recover, scan, verify}) {
    sub->add_option("--observations", observations, "observation file (default: output.observations)");
  }
  scan->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  CommandContext ctx;
  ctx.out = &std::cout;
  ctx.err = &std::cerr;
  ctx.jobs = jobs;
  ctx.strict = strict;
  if (!observations.empty()) ctx.observations = observations;
  if (!truth.empty()) ctx.truth = truth;
  try {
    ctx.config = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  if (print_config) {
    std::cout << ctx.config.effective().dump(2) << "\n";
    return kSuccess;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "a subcommand is required\n" << app.help();
    return kUsageError;
  }

  if (simulate->parsed()) return run_guarded(cmd_simulate, ctx);
  if (observe->parsed()) return run_guarded(cmd_observe, ctx);
  if (recover->parsed()) return run_guarded(cmd_recover, ctx);
  if (scan->parsed()) return run_guarded(cmd_loss_scan, ctx);
  return run_guarded(cmd_verify, ctx);
}
