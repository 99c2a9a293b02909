#include "cemsim/replay/replay_models.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "cemsim/errors.hpp"

namespace cemsim::replay {

namespace {

void require(const ReplayConfig& config, std::initializer_list<const char*> names) {
  if (!config.table) throw ConfigError("replay: no time-series table supplied");
  for (const char* n : names) (void)config.table->channel({config.subsystem_id, n});
}

double value_at(const ReplayConfig& config, const char* name, Clock t) {
  return interpolate(config.table->channel({config.subsystem_id, name}), t,
                     config.boundary_tolerance_ns);
}

double value_or(const ReplayConfig& config, const char* name, Clock t, double fallback) {
  const ChannelKey key{config.subsystem_id, name};
  if (!config.table->has(key)) return fallback;
  return interpolate(config.table->channel(key), t, config.boundary_tolerance_ns);
}

}  // namespace

ReplayPowerSource::ReplayPowerSource(Clock clock, ReplayConfig config)
    : PowerSource(clock), config_(std::move(config)) {
  require(config_, {"pv_power"});
}

PowerSourceStepResult ReplayPowerSource::step(std::int64_t step_ticks) {
  const Clock t = advance_clock(step_ticks);
  PowerSourceStepResult out;
  out.power = std::max(0.0, value_at(config_, "pv_power", t));
  out.voltage = std::max(0.0, value_or(config_, "pv_voltage", t, 0.0));
  out.current = std::max(0.0, value_or(config_, "pv_current", t, 0.0));
  return out;
}

ReplayLoad::ReplayLoad(Clock clock, ReplayConfig config) : Load(clock), config_(std::move(config)) {
  require(config_, {"load_power"});
}

LoadStepResult ReplayLoad::step(std::int64_t step_ticks) {
  const Clock t = advance_clock(step_ticks);
  const double p = std::max(0.0, value_at(config_, "load_power", t));
  const double s = value_or(config_, "load_apparent_power", t, p);
  return {p, std::max(p, s)};
}

ReplayGrid::ReplayGrid(Clock clock, ReplayConfig config) : Grid(clock), config_(std::move(config)) {
  require(config_, {"grid_power"});
}

GridStepResult ReplayGrid::step(std::int64_t step_ticks, const GridStepInput& /*input*/) {
  const Clock t = advance_clock(step_ticks);
  GridStepResult out;
  out.delivered_active_power = std::max(0.0, value_at(config_, "grid_power", t));
  out.delivered_apparent_power =
      std::max(out.delivered_active_power,
               value_or(config_, "grid_apparent_power", t, out.delivered_active_power));
  return out;
}

ReplayBattery::ReplayBattery(Clock clock, ReplayConfig config)
    : Battery(clock), config_(std::move(config)) {
  require(config_, {"battery_soc", "battery_voltage"});
  if (!(config_.battery_capacity > 0.0)) {
    throw ConfigError("replay battery: battery_capacity must be > 0 J");
  }
}

double ReplayBattery::soc_at(Clock t) const {
  return std::clamp(value_at(config_, "battery_soc", t), 0.0, 1.0);
}

BatteryStepResult ReplayBattery::step(std::int64_t step_ticks, const BatteryStepInput& /*input*/) {
  const double before = soc_at(now());
  const Clock t = advance_clock(step_ticks);
  BatteryStepResult out;
  out.soc = soc_at(t);
  out.voltage = value_at(config_, "battery_voltage", t);
  if (!(out.voltage > 0.0)) {
    throw DomainError("replay battery: recorded voltage must be > 0 V");
  }
  out.current = std::fabs(value_or(config_, "battery_current", t, 0.0));
  out.delta_energy = (out.soc - before) * config_.battery_capacity;
  out.delta_charge = out.delta_energy / out.voltage;
  return out;
}

BatteryStepResult ReplayBattery::observe() const {
  BatteryStepResult out;
  out.soc = soc_at(now());
  out.voltage = value_at(config_, "battery_voltage", now());
  return out;
}

ReplayInverter::ReplayInverter(Clock clock, ReplayConfig config)
    : Inverter(clock), config_(std::move(config)) {
  require(config_, {"grid_power", "pv_power"});
}

InverterStepResult ReplayInverter::step(std::int64_t step_ticks, const InverterStepInput& input) {
  const Clock t = advance_clock(step_ticks);
  InverterStepResult out;
  out.grid.requested_active_power = std::max(0.0, value_at(config_, "grid_power", t));
  out.grid.requested_apparent_power =
      std::max(out.grid.requested_active_power,
               value_or(config_, "grid_apparent_power", t, out.grid.requested_active_power));
  const double current = value_or(config_, "battery_current", t, 0.0);
  if (current > 0.0) {
    out.battery = {BatteryMode::Charge, current};
  } else if (current < 0.0) {
    out.battery = {BatteryMode::Discharge, -current};
  }
  out.pv_power_drawn =
      std::min(std::max(0.0, value_at(config_, "pv_power", t)), input.power_source.power);
  out.pv_power_drawn = std::max(0.0, out.pv_power_drawn);
  return out;
}

}  // namespace cemsim::replay
