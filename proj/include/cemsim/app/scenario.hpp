#pragma once

// Scenario files: JSON documents that pick a model per component and carry
// every parameter a run needs. See docs/scenario.md for the schema.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/clock.hpp"
#include "cemsim/forecast/evaluation.hpp"
#include "cemsim/forecast/features.hpp"
#include "cemsim/models/battery_linear.hpp"
#include "cemsim/models/grid_priced.hpp"
#include "cemsim/models/inverter_pv_first.hpp"
#include "cemsim/models/synthetic.hpp"

namespace cemsim::app {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr std::int64_t kNanosPerHour = 3600 * Clock::kNanosPerSecond;
inline constexpr std::int64_t kNanosPerDay = 24 * kNanosPerHour;

struct ReplayInputs {
  std::optional<std::filesystem::path> timeseries;  // resolved against the scenario directory
  std::optional<std::filesystem::path> context;
  int subsystem_id = 1;
  std::int64_t boundary_tolerance_ns = 120 * Clock::kNanosPerSecond;
  bool strict = false;
};

struct ControlSettings {
  double horizon_hours = 24.0;
  std::optional<double> max_grid_power;  // W
};

struct EstimatorSettings {
  std::string type = "heuristic";  // or "remote"
  std::string url;
  double timeout_seconds = 5.0;
};

struct ForecastSettings {
  int history_days = 14;  // synthetic days before the run used for training
  forecast::SplitConfig split;
  std::vector<forecast::FeatureFamily> families = forecast::all_feature_families();
  EstimatorSettings estimator;
};

struct Scenario {
  std::filesystem::path source_dir = ".";
  std::string name = "scenario";
  std::uint64_t seed = 0;
  Clock start;
  std::int64_t duration_ns = kNanosPerDay;
  std::int64_t step_ns = 120 * Clock::kNanosPerSecond;

  std::string power_source_model = "synthetic";  // synthetic | replay
  std::string load_model = "synthetic";          // synthetic | replay
  std::string battery_model = "linear";          // linear | replay
  std::string inverter_model = "pv_first";       // pv_first | replay
  std::string grid_model = "priced";             // priced | replay
  std::string context_model = "synthetic";       // synthetic | replay | none

  /// PV, load, jobs and price tiers. Its `start` and `day_count` cover the
  /// training history as well as the run.
  models::SyntheticScenarioConfig synthetic;
  std::optional<models::PriceSchedule> explicit_prices;
  models::BatteryLinearConfig battery;
  models::InverterPVFirstConfig inverter;
  std::optional<double> grid_active_power_limit;    // W
  std::optional<double> grid_apparent_power_limit;  // VA
  ReplayInputs replay;
  ControlSettings control;
  ForecastSettings forecast;
  std::optional<std::filesystem::path> output_dir;

  Clock end() const { return Clock(start.epoch_ns() + duration_ns, start.resolution_ns()); }
  std::int64_t step_ticks() const { return step_ns / start.resolution_ns(); }
  std::int64_t total_ticks() const { return duration_ns / start.resolution_ns(); }
  int run_days() const { return static_cast<int>((duration_ns + kNanosPerDay - 1) / kNanosPerDay); }
  bool uses_replay_series() const;

  /// Tariff over the run (and the synthetic history).
  models::PriceSchedule prices() const;
};

/// Parses a scenario document. Unknown keys, wrong types, inconsistent
/// values and missing referenced files raise ConfigError naming the key or
/// path. Relative paths resolve against `source_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& source_dir);

/// Reads and parses a scenario file; ConfigError when it is missing or not JSON.
Scenario load_scenario(const std::filesystem::path& path);

/// Command-line overrides applied after parsing.
void apply_seed(Scenario& scenario, std::uint64_t seed);
void apply_step_seconds(Scenario& scenario, double step_seconds);

/// "2025-07-29T08:00:00Z" or an integer nanosecond count.
Clock parse_time(const nlohmann::json& value, std::int64_t resolution_ns, std::string_view key);
std::string format_time(Clock t);

}  // namespace cemsim::app
