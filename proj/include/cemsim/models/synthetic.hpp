#pragma once

// Seeded synthetic stand-ins for the recorded PV, load and context streams.
// Every value is a pure function of (seed, time), so a "perfect forecast" is
// just another evaluation of the same function.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/components.hpp"
#include "cemsim/models/grid_priced.hpp"

namespace cemsim::models {

/// Uniform draw in [0, 1) keyed by (seed, stream, key); stateless.
double hashed_uniform(std::uint64_t seed, std::uint64_t stream, std::int64_t key) noexcept;

/// Fractional UTC hour of day in [0, 24).
double hour_of_day(Clock t) noexcept;

struct SyntheticPvConfig {
  std::uint64_t seed = 0;
  double peak_power = 1000.0;   // W
  double noise_amplitude = 0.0;  // multiplicative, in [0, 1]
  double sunrise_hour = 6.0;
  double sunset_hour = 18.0;
  double voltage = 300.0;  // V, fixed string voltage

  void validate() const;
};

/// Truncated cosine between sunrise and sunset peaking at solar noon, times
/// (1 + a * (2u - 1)) cloud noise, floored at zero.
double synthetic_pv_power(const SyntheticPvConfig& config, Clock t) noexcept;

class SyntheticPowerSource final : public PowerSource {
 public:
  SyntheticPowerSource(Clock clock, SyntheticPvConfig config);
  PowerSourceStepResult step(std::int64_t step_ticks) override;
  std::string name() const override { return "power_source(synthetic)"; }

 private:
  SyntheticPvConfig config_;
};

/// A job whose load contribution is true_effort * watts_per_effort while
/// begins_at <= t < ends_at. It is announced announce_lead_ns before it starts.
struct JobEvent {
  Clock begins_at;
  Clock ends_at;
  std::string description;
  double true_effort = 0.0;
  double watts_per_effort = 0.0;  // W
  std::int64_t announce_lead_ns = 6LL * 3600 * Clock::kNanosPerSecond;
  nlohmann::json metadata = nlohmann::json::object();  // numeric context fields
  int subsystem_id = 1;
};

struct SyntheticLoadConfig {
  std::uint64_t seed = 0;
  double base_load = 200.0;      // W
  double noise_amplitude = 0.0;  // multiplicative, in [0, 1]
  std::vector<JobEvent> jobs;

  void validate() const;
};

/// Noise-free job-driven load: base + sum of active jobs' effort * W/effort.
double synthetic_load_expected(const SyntheticLoadConfig& config, Clock t) noexcept;

/// Expected load times seeded multiplicative noise, floored at zero.
double synthetic_load_power(const SyntheticLoadConfig& config, Clock t) noexcept;

class SyntheticLoad final : public Load {
 public:
  SyntheticLoad(Clock clock, SyntheticLoadConfig config);
  LoadStepResult step(std::int64_t step_ticks) override;
  std::string name() const override { return "load(synthetic)"; }

 private:
  SyntheticLoadConfig config_;
};

/// Context records announcing each job: recorded_at = begins_at - lead
/// (floored at the epoch), payload = {"text": description, ...metadata}.
std::vector<ContextRecord> records_from_jobs(const std::vector<JobEvent>& jobs);

/// Replays a fixed record set through context_query at each post-step time.
class ScriptedContext final : public Context {
 public:
  ScriptedContext(Clock clock, std::vector<ContextRecord> records);
  std::vector<ContextRecord> step(std::int64_t step_ticks) override;
  std::string name() const override { return "context(scripted)"; }

  const std::vector<ContextRecord>& records() const noexcept { return records_; }

 private:
  std::vector<ContextRecord> records_;
};

/// Parameters of the random job stream used for effort-driven scenarios.
struct JobGeneratorConfig {
  int max_jobs_per_day = 3;
  double watts_per_effort = 60.0;  // W
  double effort_jitter = 0.1;      // true effort = text effort * (1 + jitter * (2u - 1))
  double earliest_start_hour = 6.0;
  double latest_start_hour = 16.0;
  double min_duration_hours = 2.0;
  double max_duration_hours = 8.0;
  double announce_lead_hours = 8.0;
};

struct PriceTiers {
  double off_peak_price = 0.1;  // cost units / kWh
  double peak_price = 0.4;
  double peak_start_hour = 7.0;
  double peak_end_hour = 22.0;
};

struct SyntheticScenarioConfig {
  std::uint64_t seed = 0;
  Clock start;  // truncated to UTC midnight for day arithmetic
  int day_count = 1;
  double pv_peak_power = 1000.0;
  double pv_noise_amplitude = 0.0;
  double sunrise_hour = 6.0;
  double sunset_hour = 18.0;
  double base_load = 200.0;
  double load_noise_amplitude = 0.0;
  std::vector<JobEvent> job_events;           // explicit jobs
  std::optional<JobGeneratorConfig> generator;  // appended random jobs
  PriceTiers prices;

  void validate() const;
};

/// Explicit jobs followed by generated ones; identical for identical configs.
std::vector<JobEvent> scenario_jobs(const SyntheticScenarioConfig& config);

SyntheticPvConfig scenario_pv(const SyntheticScenarioConfig& config);
SyntheticLoadConfig scenario_load(const SyntheticScenarioConfig& config);
PriceSchedule scenario_prices(const SyntheticScenarioConfig& config);

/// Text templates the job generator draws from.
const std::vector<std::string>& job_description_templates();

}  // namespace cemsim::models
