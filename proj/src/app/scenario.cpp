#include "cemsim/app/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>

#include "cemsim/errors.hpp"
#include "cemsim/forecast/effort.hpp"

namespace cemsim::app {

namespace {

using nlohmann::json;

// Read access to one JSON object that rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string where, std::initializer_list<std::string_view> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    for (const auto& [key, _] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ConfigError(path(key) + ": unknown key");
      }
    }
  }

  bool has(const std::string& key) const {
    const auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }
  const json& raw(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const {
    return where_.empty() ? std::string(key) : where_ + "." + std::string(key);
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key) + ": must be finite");
    return d;
  }
  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }
  std::string string(const std::string& key, std::string fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

 private:
  const json& j_;
  std::string where_;
};

const json& empty_object() {
  static const json kEmpty = json::object();
  return kEmpty;
}

const json& child(const json& doc, const std::string& key) {
  const auto it = doc.find(key);
  return it == doc.end() || it->is_null() ? empty_object() : *it;
}

std::string one_of(const Section& s, const std::string& key, std::string fallback,
                   std::initializer_list<std::string_view> choices) {
  std::string v = s.string(key, std::move(fallback));
  if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
    std::string list;
    for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
    throw ConfigError(s.path(key) + ": '" + v + "' is not one of " + list);
  }
  return v;
}

std::filesystem::path existing_file(const Section& s, const std::string& key,
                                    const std::filesystem::path& base) {
  std::filesystem::path p = s.string(key, "");
  if (p.empty()) throw ConfigError(s.path(key) + ": empty path");
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::is_regular_file(p)) {
    throw ConfigError(s.path(key) + ": file not found: " + p.string());
  }
  return p;
}

models::JobEvent parse_job(const json& j, const std::string& where, std::int64_t resolution_ns) {
  const Section s(j, where,
                  {"begins_at", "ends_at", "description", "effort", "watts_per_effort",
                   "announce_lead_hours", "metadata", "subsystem_id"});
  if (!s.has("begins_at") || !s.has("ends_at")) {
    throw ConfigError(where + ": begins_at and ends_at are required");
  }
  models::JobEvent job;
  job.begins_at = parse_time(s.raw("begins_at"), resolution_ns, s.path("begins_at"));
  job.ends_at = parse_time(s.raw("ends_at"), resolution_ns, s.path("ends_at"));
  job.description = s.string("description", "");
  job.true_effort = s.number("effort", forecast::estimate_effort_heuristic(job.description));
  job.watts_per_effort = s.number("watts_per_effort", 60.0);
  job.announce_lead_ns =
      std::llround(s.number("announce_lead_hours", 6.0) * 3600.0) * Clock::kNanosPerSecond;
  job.subsystem_id = static_cast<int>(s.integer("subsystem_id", 1));
  if (s.has("metadata")) {
    if (!s.raw("metadata").is_object()) throw ConfigError(s.path("metadata") + ": expected an object");
    job.metadata = s.raw("metadata");
  }
  return job;
}

void parse_synthetic(const json& j, Scenario& sc) {
  const Section s(j, "synthetic",
                  {"pv_peak_power", "pv_noise", "sunrise_hour", "sunset_hour", "base_load",
                   "load_noise", "jobs", "generator"});
  auto& cfg = sc.synthetic;
  cfg.pv_peak_power = s.number("pv_peak_power", cfg.pv_peak_power);
  cfg.pv_noise_amplitude = s.number("pv_noise", cfg.pv_noise_amplitude);
  cfg.sunrise_hour = s.number("sunrise_hour", cfg.sunrise_hour);
  cfg.sunset_hour = s.number("sunset_hour", cfg.sunset_hour);
  cfg.base_load = s.number("base_load", cfg.base_load);
  cfg.load_noise_amplitude = s.number("load_noise", cfg.load_noise_amplitude);
  if (s.has("jobs")) {
    const auto& jobs = s.raw("jobs");
    if (!jobs.is_array()) throw ConfigError("synthetic.jobs: expected an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      cfg.job_events.push_back(parse_job(jobs[i], "synthetic.jobs[" + std::to_string(i) + "]",
                                         sc.start.resolution_ns()));
    }
  }
  if (s.has("generator")) {
    const Section g(s.raw("generator"), "synthetic.generator",
                    {"max_jobs_per_day", "watts_per_effort", "effort_jitter",
                     "earliest_start_hour", "latest_start_hour", "min_duration_hours",
                     "max_duration_hours", "announce_lead_hours"});
    models::JobGeneratorConfig gen;
    gen.max_jobs_per_day = static_cast<int>(g.integer("max_jobs_per_day", gen.max_jobs_per_day));
    gen.watts_per_effort = g.number("watts_per_effort", gen.watts_per_effort);
    gen.effort_jitter = g.number("effort_jitter", gen.effort_jitter);
    gen.earliest_start_hour = g.number("earliest_start_hour", gen.earliest_start_hour);
    gen.latest_start_hour = g.number("latest_start_hour", gen.latest_start_hour);
    gen.min_duration_hours = g.number("min_duration_hours", gen.min_duration_hours);
    gen.max_duration_hours = g.number("max_duration_hours", gen.max_duration_hours);
    gen.announce_lead_hours = g.number("announce_lead_hours", gen.announce_lead_hours);
    cfg.generator = gen;
  }
}

void parse_prices(const json& j, Scenario& sc) {
  const Section head(j, "prices",
                     {"type", "off_peak", "peak", "peak_start_hour", "peak_end_hour", "price",
                      "breakpoints"});
  const std::string type = one_of(head, "type", "two_tier", {"two_tier", "flat", "schedule"});
  auto& tiers = sc.synthetic.prices;
  if (type == "two_tier") {
    const Section s(j, "prices", {"type", "off_peak", "peak", "peak_start_hour", "peak_end_hour"});
    tiers.off_peak_price = s.number("off_peak", tiers.off_peak_price);
    tiers.peak_price = s.number("peak", tiers.peak_price);
    tiers.peak_start_hour = s.number("peak_start_hour", tiers.peak_start_hour);
    tiers.peak_end_hour = s.number("peak_end_hour", tiers.peak_end_hour);
    return;
  }
  if (type == "flat") {
    const Section s(j, "prices", {"type", "price"});
    const double price = s.number("price", 0.0);
    tiers.off_peak_price = price;
    tiers.peak_price = price;
    return;
  }
  const Section s(j, "prices", {"type", "breakpoints"});
  if (!s.has("breakpoints") || !s.raw("breakpoints").is_array()) {
    throw ConfigError("prices.breakpoints: expected an array");
  }
  std::vector<models::PriceSchedule::Breakpoint> points;
  const auto& arr = s.raw("breakpoints");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "prices.breakpoints[" + std::to_string(i) + "]";
    const Section b(arr[i], where, {"start", "price"});
    if (!b.has("start")) throw ConfigError(where + ".start: required");
    points.push_back({parse_time(b.raw("start"), sc.start.resolution_ns(), b.path("start")),
                      b.number("price", 0.0)});
  }
  sc.explicit_prices = models::PriceSchedule(std::move(points));
}

void parse_components(const json& j, Scenario& sc) {
  const Section s(j, "components",
                  {"power_source", "load", "battery", "inverter", "grid", "context"});

  const Section ps(child(j, "power_source"), "components.power_source", {"model"});
  sc.power_source_model = one_of(ps, "model", "synthetic", {"synthetic", "replay"});

  const Section ld(child(j, "load"), "components.load", {"model"});
  sc.load_model = one_of(ld, "model", "synthetic", {"synthetic", "replay"});

  const Section bt(child(j, "battery"), "components.battery",
                   {"model", "capacity_j", "eta_charge", "eta_discharge", "nominal_voltage",
                    "initial_soc"});
  sc.battery_model = one_of(bt, "model", "linear", {"linear", "replay"});
  sc.battery.capacity = bt.number("capacity_j", sc.battery.capacity);
  sc.battery.eta_charge = bt.number("eta_charge", sc.battery.eta_charge);
  sc.battery.eta_discharge = bt.number("eta_discharge", sc.battery.eta_discharge);
  sc.battery.nominal_voltage = bt.number("nominal_voltage", sc.battery.nominal_voltage);
  sc.battery.initial_soc = bt.number("initial_soc", sc.battery.initial_soc);

  const Section inv(child(j, "inverter"), "components.inverter",
                    {"model", "eta_pv_to_batt", "eta_pv_to_load", "eta_batt_to_load", "soc_min",
                     "soc_max", "self_power", "max_charge_power", "max_discharge_power"});
  sc.inverter_model = one_of(inv, "model", "pv_first", {"pv_first", "replay"});
  auto& ic = sc.inverter;
  ic.eta_pv_to_batt = inv.number("eta_pv_to_batt", ic.eta_pv_to_batt);
  ic.eta_pv_to_load = inv.number("eta_pv_to_load", ic.eta_pv_to_load);
  ic.eta_batt_to_load = inv.number("eta_batt_to_load", ic.eta_batt_to_load);
  ic.soc_min = inv.number("soc_min", ic.soc_min);
  ic.soc_max = inv.number("soc_max", ic.soc_max);
  ic.self_power = inv.number("self_power", ic.self_power);
  ic.max_charge_power = inv.number("max_charge_power", ic.max_charge_power);
  ic.max_discharge_power = inv.number("max_discharge_power", ic.max_discharge_power);

  const Section gr(child(j, "grid"), "components.grid",
                   {"model", "active_power_limit", "apparent_power_limit"});
  sc.grid_model = one_of(gr, "model", "priced", {"priced", "replay"});
  sc.grid_active_power_limit = gr.optional_number("active_power_limit");
  sc.grid_apparent_power_limit = gr.optional_number("apparent_power_limit");

  const Section cx(child(j, "context"), "components.context", {"model"});
  sc.context_model = one_of(cx, "model", "synthetic", {"synthetic", "replay", "none"});
}

void parse_inputs(const json& j, Scenario& sc) {
  const Section s(j, "inputs",
                  {"timeseries", "context", "subsystem_id", "boundary_tolerance_seconds", "strict"});
  auto& r = sc.replay;
  if (s.has("timeseries")) r.timeseries = existing_file(s, "timeseries", sc.source_dir);
  if (s.has("context")) r.context = existing_file(s, "context", sc.source_dir);
  r.subsystem_id = static_cast<int>(s.integer("subsystem_id", r.subsystem_id));
  const double tol = s.number("boundary_tolerance_seconds", 120.0);
  if (!(tol >= 0.0)) throw ConfigError("inputs.boundary_tolerance_seconds: must be >= 0");
  r.boundary_tolerance_ns = std::llround(tol * 1e9);
  r.strict = s.boolean("strict", r.strict);
}

void parse_control(const json& j, Scenario& sc) {
  const Section s(j, "control", {"horizon_hours", "max_grid_power"});
  sc.control.horizon_hours = s.number("horizon_hours", sc.control.horizon_hours);
  sc.control.max_grid_power = s.optional_number("max_grid_power");
  if (!(sc.control.horizon_hours > 0.0)) throw ConfigError("control.horizon_hours: must be > 0");
}

void parse_forecast(const json& j, Scenario& sc) {
  const Section s(j, "forecast",
                  {"history_days", "train_fraction", "resamples", "split_seed", "families",
                   "ridge_fallback", "estimator"});
  auto& f = sc.forecast;
  f.history_days = static_cast<int>(s.integer("history_days", f.history_days));
  if (f.history_days < 0) throw ConfigError("forecast.history_days: must be >= 0");
  f.split.train_fraction = s.number("train_fraction", f.split.train_fraction);
  f.split.resamples = static_cast<int>(s.integer("resamples", f.split.resamples));
  f.split.seed = static_cast<std::uint64_t>(s.integer("split_seed", 0));
  f.split.fit.ridge_fallback = s.boolean("ridge_fallback", true);
  if (s.has("families")) {
    const auto& arr = s.raw("families");
    if (!arr.is_array()) throw ConfigError("forecast.families: expected an array of names");
    f.families.clear();
    for (const auto& v : arr) {
      if (!v.is_string()) throw ConfigError("forecast.families: expected an array of names");
      f.families.push_back(forecast::parse_feature_family(v.get<std::string>()));
    }
    if (f.families.empty()) throw ConfigError("forecast.families: must not be empty");
  }
  if (s.has("estimator")) {
    const Section e(s.raw("estimator"), "forecast.estimator", {"type", "url", "timeout_seconds"});
    f.estimator.type = one_of(e, "type", "heuristic", {"heuristic", "remote"});
    f.estimator.url = e.string("url", "");
    f.estimator.timeout_seconds = e.number("timeout_seconds", f.estimator.timeout_seconds);
    if (f.estimator.type == "remote" && f.estimator.url.empty()) {
      throw ConfigError("forecast.estimator.url: required for the remote estimator");
    }
  }
  try {
    f.split.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("forecast: ") + e.what());
  }
}

// Synthetic timeline: history days before the run plus the run itself.
void finish_synthetic(Scenario& sc) {
  const std::int64_t midnight = sc.start.epoch_ns() - sc.start.epoch_ns() % kNanosPerDay;
  const std::int64_t history_ns = sc.forecast.history_days * kNanosPerDay;
  const std::int64_t first = std::max<std::int64_t>(0, midnight - history_ns);
  sc.synthetic.seed = sc.seed;
  sc.synthetic.start = Clock(first, sc.start.resolution_ns());
  const std::int64_t span = sc.end().epoch_ns() - first;
  sc.synthetic.day_count = static_cast<int>((span + kNanosPerDay - 1) / kNanosPerDay);
}

void check_consistency(const Scenario& sc) {
  if (sc.duration_ns <= 0) throw ConfigError("duration_hours: must be > 0");
  if (sc.step_ns <= 0) throw ConfigError("step_seconds: must be > 0");
  if (sc.step_ns % sc.start.resolution_ns() != 0 || sc.duration_ns % sc.start.resolution_ns() != 0) {
    throw ConfigError("step_seconds and duration_hours must be whole multiples of the clock resolution");
  }
  if (sc.uses_replay_series() && !sc.replay.timeseries) {
    throw ConfigError("inputs.timeseries: required when a component uses the replay model");
  }
  if (sc.context_model == "replay" && !sc.replay.context) {
    throw ConfigError("inputs.context: required when components.context.model is replay");
  }
  try {
    sc.battery.validate();
    sc.inverter.validate();
    sc.synthetic.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("components: ") + e.what());
  }
  for (const auto& lim : {sc.grid_active_power_limit, sc.grid_apparent_power_limit}) {
    if (lim && !(*lim > 0.0)) throw ConfigError("components.grid: power limits must be > 0");
  }
  if (sc.control.max_grid_power && !(*sc.control.max_grid_power > 0.0)) {
    throw ConfigError("control.max_grid_power: must be > 0 W");
  }
}

}  // namespace

bool Scenario::uses_replay_series() const {
  return power_source_model == "replay" || load_model == "replay" || battery_model == "replay" ||
         inverter_model == "replay" || grid_model == "replay";
}

models::PriceSchedule Scenario::prices() const {
  if (explicit_prices) return *explicit_prices;
  return models::scenario_prices(synthetic);
}

Clock parse_time(const nlohmann::json& value, std::int64_t resolution_ns, std::string_view key) {
  if (value.is_number_integer()) {
    const auto ns = value.get<std::int64_t>();
    if (ns < 0) throw ConfigError(std::string(key) + ": time must be >= 0 ns");
    return Clock(ns, resolution_ns);
  }
  if (!value.is_string()) {
    throw ConfigError(std::string(key) + ": expected an ISO-8601 UTC time or integer nanoseconds");
  }
  const std::string s = value.get<std::string>();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char z = 0;
  int consumed = 0;
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%n", &y, &mo, &d, &h, &mi, &sec,
                            &z, &consumed);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (n != 7 || z != 'Z' || static_cast<std::size_t>(consumed) != s.size() || !ymd.ok() || h > 23 ||
      mi > 59 || sec > 59 || h < 0 || mi < 0 || sec < 0) {
    throw ConfigError(std::string(key) + ": '" + s + "' is not of the form YYYY-MM-DDTHH:MM:SSZ");
  }
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  if (days < 0) throw ConfigError(std::string(key) + ": times before 1970 are not supported");
  const std::int64_t secs = static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec;
  return Clock(secs * Clock::kNanosPerSecond, resolution_ns);
}

std::string format_time(Clock t) {
  const std::int64_t total_s = t.epoch_ns() / Clock::kNanosPerSecond;
  const std::chrono::sys_days day{std::chrono::days{total_s / 86400}};
  const std::chrono::year_month_day ymd{day};
  const std::int64_t rem = total_s % 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& source_dir) {
  const Section s(doc, "",
                  {"schema_version", "name", "seed", "clock", "duration_hours", "step_seconds",
                   "synthetic", "prices", "components", "inputs", "control", "forecast",
                   "output_dir"});
  const auto version = s.integer("schema_version", kScenarioSchemaVersion);
  if (version != kScenarioSchemaVersion) {
    throw ConfigError("schema_version: expected " + std::to_string(kScenarioSchemaVersion) +
                      ", got " + std::to_string(version));
  }
  Scenario sc;
  sc.source_dir = source_dir;
  sc.name = s.string("name", sc.name);
  const auto seed = s.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed: must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);

  const Section clock(child(doc, "clock"), "clock", {"start", "resolution_ns"});
  const std::int64_t resolution = clock.integer("resolution_ns", Clock::kNanosPerSecond);
  if (resolution <= 0) throw ConfigError("clock.resolution_ns: must be > 0");
  sc.start = clock.has("start") ? parse_time(clock.raw("start"), resolution, "clock.start")
                                : Clock(0, resolution);

  const double hours = s.number("duration_hours", 24.0);
  const double step_s = s.number("step_seconds", 120.0);
  if (!(hours > 0.0) || !(step_s > 0.0)) {
    throw ConfigError("duration_hours and step_seconds must be > 0");
  }
  sc.duration_ns = std::llround(hours * 3600.0 * 1e9);
  sc.step_ns = std::llround(step_s * 1e9);

  parse_synthetic(child(doc, "synthetic"), sc);
  parse_prices(child(doc, "prices"), sc);
  parse_components(child(doc, "components"), sc);
  parse_inputs(child(doc, "inputs"), sc);
  parse_control(child(doc, "control"), sc);
  parse_forecast(child(doc, "forecast"), sc);
  if (s.has("output_dir")) {
    std::filesystem::path out = s.string("output_dir", "");
    sc.output_dir = out.is_relative() ? source_dir / out : out;
  }
  finish_synthetic(sc);
  check_consistency(sc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario file not found: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario " + path.string() + ": " + e.what());
  }
  Scenario sc = parse_scenario(doc, path.parent_path().empty() ? "." : path.parent_path());
  if (!doc.contains("name")) sc.name = path.stem().string();
  return sc;
}

void apply_seed(Scenario& scenario, std::uint64_t seed) {
  scenario.seed = seed;
  scenario.synthetic.seed = seed;
}

void apply_step_seconds(Scenario& scenario, double step_seconds) {
  if (!(step_seconds > 0.0)) throw ConfigError("--step-seconds: must be > 0");
  scenario.step_ns = std::llround(step_seconds * 1e9);
  check_consistency(scenario);
}

}  // namespace cemsim::app
