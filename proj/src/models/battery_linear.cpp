#include "cemsim/models/battery_linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cemsim/errors.hpp"

namespace cemsim::models {

void BatteryLinearConfig::validate() const {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw ConfigError("battery: capacity must be > 0 J");
  }
  if (!(eta_charge > 0.0 && eta_charge <= 1.0)) {
    throw ConfigError("battery: eta_charge must be in (0, 1]");
  }
  if (!(eta_discharge > 0.0 && eta_discharge <= 1.0)) {
    throw ConfigError("battery: eta_discharge must be in (0, 1]");
  }
  if (!(nominal_voltage > 0.0)) throw ConfigError("battery: nominal_voltage must be > 0 V");
  if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
    throw ConfigError("battery: initial_soc must be in [0, 1]");
  }
}

double battery_linear_raw_delta(const BatteryLinearConfig& config, const BatteryStepInput& input,
                                double dt_s) noexcept {
  switch (input.mode) {
    case BatteryMode::Idle:
      return 0.0;
    case BatteryMode::Charge:
      return dt_s * config.nominal_voltage * input.current * config.eta_charge;
    case BatteryMode::Discharge:
      return -(dt_s * config.nominal_voltage * input.current / config.eta_discharge);
  }
  return 0.0;
}

BatteryLinear::BatteryLinear(Clock clock, BatteryLinearConfig config)
    : Battery(clock), config_(config) {
  config_.validate();
  energy_ = config_.initial_soc * config_.capacity;
}

BatteryStepResult BatteryLinear::step(std::int64_t step_ticks, const BatteryStepInput& input) {
  if (!(input.current >= 0.0) || !std::isfinite(input.current)) {
    throw DomainError("battery: input current must be finite and >= 0, got " +
                      std::to_string(input.current));
  }
  const double dt = now().ticks_to_seconds(step_ticks);
  advance_clock(step_ticks);

  const double raw = battery_linear_raw_delta(config_, input, dt);
  const double unclamped = energy_ + raw;
  const double next = std::clamp(unclamped, 0.0, config_.capacity);
  // Report the formula value itself unless the clamp engaged; next - energy_
  // would lose digits when raw is small next to the stored energy.
  const double delta = next == unclamped ? raw : next - energy_;
  energy_ = next;

  BatteryStepResult out;
  out.soc = energy_ / config_.capacity;
  out.voltage = config_.nominal_voltage;
  out.current = input.current;
  out.delta_energy = delta;
  out.delta_charge = delta / config_.nominal_voltage;
  return out;
}

BatteryStepResult BatteryLinear::observe() const {
  BatteryStepResult out;
  out.soc = energy_ / config_.capacity;
  out.voltage = config_.nominal_voltage;
  return out;
}

}  // namespace cemsim::models
