// cemsim: microgrid simulation, strategy comparison and forecast evaluation.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cemsim/app/commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cemsim");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  // CEMSIM_LOG=debug, CEMSIM_LOG=info, ... (spdlog's SPDLOG_LEVEL syntax).
  if (const char* level = std::getenv("CEMSIM_LOG"); level && *level) {
    spdlog::cfg::helpers::load_levels(level);
  }
}

void add_scenario_flags(CLI::App* cmd, cemsim::app::CommandOptions& o, std::string& step_seconds,
                        std::string& seed) {
  cmd->add_option("--scenario", o.scenarios, "Scenario JSON file (repeatable for run)")->required();
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", seed, "Override the scenario seed");
  cmd->add_option("--step-seconds", step_seconds, "Override the step length in seconds");
  cmd->add_option("--jobs", o.jobs, "Worker threads for batch work (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  namespace app = cemsim::app;

  CLI::App cli{"cemsim - component-based microgrid simulator"};
  cli.require_subcommand(1);

  app::CommandOptions options;
  std::string step_seconds;
  std::string seed;
  std::vector<std::filesystem::path> files;
  bool strict = false;

  auto* run = cli.add_subcommand("run", "Simulate scenarios with the PV-first inverter");
  add_scenario_flags(run, options, step_seconds, seed);

  auto* compare = cli.add_subcommand("compare", "Compare dispatch strategies on one scenario");
  add_scenario_flags(compare, options, step_seconds, seed);
  compare->add_option("--strategies", options.strategies,
                      "Comma list of default, mpc-perfect, mpc-context, mpc-nocontext");

  auto* fe = cli.add_subcommand("forecast-eval", "RMSE of each load-forecast feature family");
  add_scenario_flags(fe, options, step_seconds, seed);
  fe->add_option("--families", options.families, "Comma list of none, numeric, effort, combined");

  auto* validate = cli.add_subcommand("validate", "Check time-series and context files");
  validate->add_option("files", files, "Files to check")->required();
  validate->add_flag("--strict", strict, "Treat unknown channels and columns as errors");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::kExitConfig;
  }

  try {
    if (!seed.empty()) options.seed = std::stoull(seed);
    if (!step_seconds.empty()) options.step_seconds = std::stod(step_seconds);
  } catch (const std::exception&) {
    std::cerr << "error: --seed and --step-seconds need numeric values\n";
    return app::kExitConfig;
  }

  if (*run) return app::cmd_run(options, std::cout, std::cerr);
  if (*compare) return app::cmd_compare(options, std::cout, std::cerr);
  if (*fe) return app::cmd_forecast_eval(options, std::cout, std::cerr);
  return app::cmd_validate(files, strict, std::cout, std::cerr);
}
