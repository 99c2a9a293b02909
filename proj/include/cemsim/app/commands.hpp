#pragma once

// Subcommands of the cemsim tool. Each returns the process exit code:
//   0  success
//   1  configuration or input error (bad scenario, missing or invalid file)
//   2  runtime failure during simulation or solving

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/app/scenario.hpp"
#include "cemsim/app/strategies.hpp"
#include "cemsim/engine/batch.hpp"

namespace cemsim::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

struct CommandOptions {
  std::vector<std::filesystem::path> scenarios;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_seconds;
  std::string strategies;  // comma list, empty = all
  std::string families;    // comma list, empty = scenario setting
  int jobs = 0;            // 0 = OpenMP default
  bool strict = false;     // validate: unknown channels/columns are errors
};

/// Loads a scenario and applies --seed / --step-seconds.
Scenario load_with_overrides(const std::filesystem::path& path, const CommandOptions& options);

/// Runs one strategy and writes steps.csv, channels.csv, context.jsonl and
/// summary.json into `dir`. Returns the summary document.
nlohmann::json run_to_directory(const Scenario& scenario, const ScenarioData& data,
                                Strategy strategy, const std::filesystem::path& dir);

struct StrategyRun {
  Strategy strategy = Strategy::Default;
  std::vector<std::int64_t> step_start_ns;
  std::vector<double> step_cost;
  std::vector<double> cumulative_cost;
  engine::Aggregates totals;
  double final_soc = 0.0;
};

struct Comparison {
  std::vector<StrategyRun> runs;  // in the requested order
  std::optional<double> open_loop_cost;
  /// Rows per run day, 24 hourly columns: default cost minus mpc-context
  /// cost accumulated from the start of that day to the end of each hour.
  /// Empty unless both strategies ran.
  std::vector<std::array<double, 24>> savings_by_hour;

  const StrategyRun* find(Strategy s) const;
};

Comparison compare_strategies(const Scenario& scenario, const ScenarioData& data,
                              const std::vector<Strategy>& strategies, int jobs);

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_forecast_eval(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const std::vector<std::filesystem::path>& files, bool strict, std::ostream& out,
                 std::ostream& err);

}  // namespace cemsim::app
