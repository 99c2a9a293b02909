#include "cemsim/models/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cemsim/errors.hpp"
#include "cemsim/forecast/effort.hpp"

namespace cemsim::models {

namespace {

constexpr std::int64_t kNanosPerDay = 86'400LL * Clock::kNanosPerSecond;
constexpr std::int64_t kNanosPerHour = 3'600LL * Clock::kNanosPerSecond;

constexpr std::uint64_t kStreamPv = 0x5056;
constexpr std::uint64_t kStreamLoad = 0x4c4f4144;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Bits to [0, 1) without relying on distribution implementations.
double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double noisy(double value, double amplitude, double u) noexcept {
  return std::max(0.0, value * (1.0 + amplitude * (2.0 * u - 1.0)));
}

void check_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must be in [0, 1]");
}

Clock midnight_of(Clock t) {
  return Clock(t.epoch_ns() - t.epoch_ns() % kNanosPerDay, t.resolution_ns());
}

Clock at_offset(Clock base, std::int64_t ns) { return Clock(base.epoch_ns() + ns, base.resolution_ns()); }

}  // namespace

double hashed_uniform(std::uint64_t seed, std::uint64_t stream, std::int64_t key) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key));
  return to_unit(h);
}

double hour_of_day(Clock t) noexcept {
  return static_cast<double>(t.epoch_ns() % kNanosPerDay) / static_cast<double>(kNanosPerHour);
}

void SyntheticPvConfig::validate() const {
  if (!(peak_power >= 0.0)) throw ConfigError("pv: peak_power must be >= 0 W");
  check_fraction(noise_amplitude, "pv: noise_amplitude");
  if (!(0.0 <= sunrise_hour && sunrise_hour < sunset_hour && sunset_hour <= 24.0)) {
    throw ConfigError("pv: need 0 <= sunrise_hour < sunset_hour <= 24");
  }
  if (!(voltage > 0.0)) throw ConfigError("pv: voltage must be > 0 V");
}

double synthetic_pv_power(const SyntheticPvConfig& config, Clock t) noexcept {
  const double h = hour_of_day(t);
  if (h <= config.sunrise_hour || h >= config.sunset_hour) return 0.0;
  const double noon = 0.5 * (config.sunrise_hour + config.sunset_hour);
  const double width = config.sunset_hour - config.sunrise_hour;
  const double clear_sky = config.peak_power * std::cos(std::numbers::pi * (h - noon) / width);
  if (config.noise_amplitude == 0.0) return std::max(0.0, clear_sky);
  return noisy(clear_sky, config.noise_amplitude,
               hashed_uniform(config.seed, kStreamPv, t.epoch_ns()));
}

SyntheticPowerSource::SyntheticPowerSource(Clock clock, SyntheticPvConfig config)
    : PowerSource(clock), config_(config) {
  config_.validate();
}

PowerSourceStepResult SyntheticPowerSource::step(std::int64_t step_ticks) {
  const Clock t = advance_clock(step_ticks);
  PowerSourceStepResult out;
  out.power = synthetic_pv_power(config_, t);
  out.voltage = config_.voltage;
  out.current = out.power / config_.voltage;
  return out;
}

void SyntheticLoadConfig::validate() const {
  if (!(base_load >= 0.0)) throw ConfigError("load: base_load must be >= 0 W");
  check_fraction(noise_amplitude, "load: noise_amplitude");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    if (!(j.begins_at < j.ends_at)) {
      throw ConfigError("load: job " + std::to_string(i) + " must end after it begins");
    }
    if (!(j.true_effort >= 0.0) || !(j.watts_per_effort >= 0.0)) {
      throw ConfigError("load: job " + std::to_string(i) + " effort and W/effort must be >= 0");
    }
  }
}

double synthetic_load_expected(const SyntheticLoadConfig& config, Clock t) noexcept {
  double p = config.base_load;
  for (const auto& job : config.jobs) {
    if (job.begins_at <= t && t < job.ends_at) p += job.true_effort * job.watts_per_effort;
  }
  return p;
}

double synthetic_load_power(const SyntheticLoadConfig& config, Clock t) noexcept {
  const double expected = synthetic_load_expected(config, t);
  if (config.noise_amplitude == 0.0) return expected;
  return noisy(expected, config.noise_amplitude,
               hashed_uniform(config.seed, kStreamLoad, t.epoch_ns()));
}

SyntheticLoad::SyntheticLoad(Clock clock, SyntheticLoadConfig config)
    : Load(clock), config_(std::move(config)) {
  config_.validate();
}

LoadStepResult SyntheticLoad::step(std::int64_t step_ticks) {
  const Clock t = advance_clock(step_ticks);
  const double p = synthetic_load_power(config_, t);
  return {p, p};
}

std::vector<ContextRecord> records_from_jobs(const std::vector<JobEvent>& jobs) {
  std::vector<ContextRecord> records;
  records.reserve(jobs.size());
  for (const auto& job : jobs) {
    nlohmann::json payload = job.metadata.is_object() ? job.metadata : nlohmann::json::object();
    payload["text"] = job.description;
    const std::int64_t rec = std::max<std::int64_t>(0, job.begins_at.epoch_ns() - job.announce_lead_ns);
    records.push_back(make_context_record(Clock(rec, job.begins_at.resolution_ns()), job.begins_at,
                                          job.ends_at, job.subsystem_id, std::move(payload)));
  }
  normalize_context_order(records);
  return records;
}

ScriptedContext::ScriptedContext(Clock clock, std::vector<ContextRecord> records)
    : Context(clock), records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (auto problem = validate_context_record(records_[i]); !problem.empty()) {
      throw ValidationError("context record " + std::to_string(i) + ": " + problem, i);
    }
  }
}

std::vector<ContextRecord> ScriptedContext::step(std::int64_t step_ticks) {
  return context_query(records_, advance_clock(step_ticks));
}

const std::vector<std::string>& job_description_templates() {
  static const std::vector<std::string> kTemplates = {
      "CPU-intensive, multi-core numeric robustness test",
      "GPU model fitting run",
      "Compiling the geometry library (full build)",
      "Multi-core parameter sweep",
      "CPU-intensive simulation batch",
      "GPU inference benchmark, multi-core preprocessing",
      "Incremental build of the test suite",
      "Light data cleanup script",
      "CPU-intensive compile of all targets",
      "GPU training job, CPU-intensive data loading",
  };
  return kTemplates;
}

void SyntheticScenarioConfig::validate() const {
  if (day_count < 1) throw ConfigError("scenario: day_count must be >= 1");
  scenario_pv(*this).validate();
  SyntheticLoadConfig load;
  load.base_load = base_load;
  load.noise_amplitude = load_noise_amplitude;
  load.jobs = job_events;
  load.validate();
  if (generator) {
    const auto& g = *generator;
    if (g.max_jobs_per_day < 0) throw ConfigError("generator: max_jobs_per_day must be >= 0");
    if (!(g.watts_per_effort >= 0.0)) throw ConfigError("generator: watts_per_effort must be >= 0");
    check_fraction(g.effort_jitter, "generator: effort_jitter");
    if (!(0.0 <= g.earliest_start_hour && g.earliest_start_hour <= g.latest_start_hour &&
          g.latest_start_hour < 24.0)) {
      throw ConfigError("generator: need 0 <= earliest_start_hour <= latest_start_hour < 24");
    }
    if (!(0.0 < g.min_duration_hours && g.min_duration_hours <= g.max_duration_hours)) {
      throw ConfigError("generator: need 0 < min_duration_hours <= max_duration_hours");
    }
    if (!(g.announce_lead_hours >= 0.0)) throw ConfigError("generator: announce_lead_hours must be >= 0");
  }
  if (!(prices.off_peak_price >= 0.0 && prices.peak_price >= 0.0)) {
    throw ConfigError("scenario: prices must be >= 0");
  }
}

std::vector<JobEvent> scenario_jobs(const SyntheticScenarioConfig& config) {
  std::vector<JobEvent> jobs = config.job_events;
  if (!config.generator) return jobs;
  const auto& g = *config.generator;
  const auto& templates = job_description_templates();
  std::mt19937_64 rng(splitmix64(config.seed ^ 0x4a4f4253ULL));
  auto uniform = [&rng] { return to_unit(rng()); };
  const Clock day0 = midnight_of(config.start);
  for (int d = 0; d < config.day_count; ++d) {
    const int count = static_cast<int>(uniform() * (g.max_jobs_per_day + 1));
    for (int k = 0; k < count; ++k) {
      const double start_h =
          g.earliest_start_hour + uniform() * (g.latest_start_hour - g.earliest_start_hour);
      const double dur_h =
          g.min_duration_hours + uniform() * (g.max_duration_hours - g.min_duration_hours);
      const auto& text = templates[static_cast<std::size_t>(uniform() * static_cast<double>(templates.size()))];
      const double jitter = 1.0 + g.effort_jitter * (2.0 * uniform() - 1.0);

      // Start and duration snap to whole minutes so windows align with step grids.
      const std::int64_t begin_ns = d * kNanosPerDay + std::llround(start_h * 60.0) * 60 * Clock::kNanosPerSecond;
      const std::int64_t dur_ns = std::llround(dur_h * 60.0) * 60 * Clock::kNanosPerSecond;

      JobEvent job;
      job.begins_at = at_offset(day0, begin_ns);
      job.ends_at = at_offset(day0, begin_ns + dur_ns);
      job.description = text;
      job.true_effort = forecast::estimate_effort_heuristic(text) * jitter;
      job.watts_per_effort = g.watts_per_effort;
      job.announce_lead_ns = std::llround(g.announce_lead_hours * 3600.0) * Clock::kNanosPerSecond;

      // Numeric metadata loosely tied to the job class.
      const std::string lower = forecast::to_lower(text);
      nlohmann::json meta = nlohmann::json::object();
      if (lower.find("multi-core") != std::string::npos || lower.find("cpu") != std::string::npos) {
        meta["cores"] = 4 + static_cast<int>(uniform() * 29);
      }
      if (lower.find("compil") != std::string::npos || lower.find("build") != std::string::npos) {
        meta["files"] = 50 + static_cast<int>(uniform() * 951);
      }
      if (lower.find("gpu") != std::string::npos) {
        meta["parameters"] = std::round(1e6 * std::pow(10.0, 3.0 * uniform()));
      }
      job.metadata = std::move(meta);
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

SyntheticPvConfig scenario_pv(const SyntheticScenarioConfig& config) {
  SyntheticPvConfig pv;
  pv.seed = config.seed;
  pv.peak_power = config.pv_peak_power;
  pv.noise_amplitude = config.pv_noise_amplitude;
  pv.sunrise_hour = config.sunrise_hour;
  pv.sunset_hour = config.sunset_hour;
  return pv;
}

SyntheticLoadConfig scenario_load(const SyntheticScenarioConfig& config) {
  SyntheticLoadConfig load;
  load.seed = config.seed;
  load.base_load = config.base_load;
  load.noise_amplitude = config.load_noise_amplitude;
  load.jobs = scenario_jobs(config);
  return load;
}

PriceSchedule scenario_prices(const SyntheticScenarioConfig& config) {
  return PriceSchedule::two_tier(midnight_of(config.start), config.day_count + 1,
                                 config.prices.off_peak_price, config.prices.peak_price,
                                 config.prices.peak_start_hour, config.prices.peak_end_hour);
}

}  // namespace cemsim::models
