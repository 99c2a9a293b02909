#include "cemsim/models/inverter_pv_first.hpp"

#include <algorithm>
#include <cmath>

#include "cemsim/errors.hpp"

namespace cemsim::models {

namespace {

bool in_unit_interval(double eta) { return eta > 0.0 && eta <= 1.0; }

// Converts `amount` through efficiency `eta`, returning exactly `target` when
// `amount` was itself derived as target / eta. Keeps unit-efficiency paths
// free of round-off.
double through(double amount, double eta, double unclamped, double target) {
  return amount == unclamped ? target : amount * eta;
}

}  // namespace

void InverterPVFirstConfig::validate() const {
  if (!in_unit_interval(eta_pv_to_batt) || !in_unit_interval(eta_pv_to_load) ||
      !in_unit_interval(eta_batt_to_load)) {
    throw ConfigError("inverter: efficiencies must be in (0, 1]");
  }
  if (!(soc_min >= 0.0 && soc_max <= 1.0 && soc_min < soc_max)) {
    throw ConfigError("inverter: need 0 <= soc_min < soc_max <= 1");
  }
  if (!(self_power >= 0.0)) throw ConfigError("inverter: self_power must be >= 0 W");
  if (!(max_charge_power > 0.0) || !(max_discharge_power > 0.0)) {
    throw ConfigError("inverter: charge/discharge power caps must be > 0 W");
  }
  if (storage) {
    if (!(storage->capacity > 0.0)) throw ConfigError("inverter: storage capacity must be > 0 J");
    if (!in_unit_interval(storage->eta_charge) || !in_unit_interval(storage->eta_discharge)) {
      throw ConfigError("inverter: storage efficiencies must be in (0, 1]");
    }
  }
}

InverterStepResult inverter_pv_first_dispatch(const InverterPVFirstConfig& config, double dt_s,
                                              const InverterStepInput& input) {
  const double soc = input.battery.soc;
  const double voltage = input.battery.voltage;
  const double pv_available = std::max(0.0, input.power_source.power);
  const double load_active = std::max(0.0, input.load.requested_active_power);
  const double load_apparent = std::max(load_active, input.load.requested_apparent_power);

  double grid_to_battery = 0.0;
  double grid_to_load = 0.0;
  if (input.directive) {
    grid_to_battery = std::max(0.0, input.directive->grid_to_battery_power);
    grid_to_load = std::max(0.0, input.directive->grid_to_load_power);
  }

  // 1. PV serves the AC demand.
  const double demand = load_active + config.self_power;
  const double pv_needed = demand / config.eta_pv_to_load;
  const double pv_to_load = std::min(pv_available, pv_needed);
  const double pv_served = through(pv_to_load, config.eta_pv_to_load, pv_needed, demand);
  double deficit = std::max(0.0, demand - pv_served);
  const double pv_surplus = pv_available - pv_to_load;

  // 2. Surplus PV, then directed grid power, into the battery.
  double charge_room = 0.0;
  if (soc < config.soc_max) {
    charge_room = config.max_charge_power;
    if (config.storage) {
      const double headroom = (config.soc_max - soc) * config.storage->capacity /
                              (dt_s * config.storage->eta_charge);
      charge_room = std::min(charge_room, std::max(0.0, headroom));
    }
  }
  const double pv_charge_wanted = pv_surplus * config.eta_pv_to_batt;
  const double pv_charge = std::min(pv_charge_wanted, charge_room);
  const double pv_drawn_for_charge =
      pv_charge == pv_charge_wanted ? pv_surplus : pv_charge / config.eta_pv_to_batt;
  const double grid_charge = std::min(grid_to_battery, charge_room - pv_charge);
  const double charge = pv_charge + grid_charge;

  // 3. Battery covers what the grid is not reserved for.
  double discharge = 0.0;
  if (charge <= 0.0 && grid_to_battery <= 0.0 && deficit > 0.0 && soc > config.soc_min) {
    const double battery_need = std::max(0.0, deficit - grid_to_load);
    double room = config.max_discharge_power;
    if (config.storage) {
      const double headroom = (soc - config.soc_min) * config.storage->capacity *
                              config.storage->eta_discharge / dt_s;
      room = std::min(room, std::max(0.0, headroom));
    }
    const double wanted = battery_need / config.eta_batt_to_load;
    discharge = std::min(wanted, room);
    deficit -= through(discharge, config.eta_batt_to_load, wanted, battery_need);
    deficit = std::max(0.0, deficit);
  }

  // 4. Grid takes the rest.
  InverterStepResult out;
  out.pv_power_drawn = std::min(pv_available, pv_to_load + pv_drawn_for_charge);
  out.grid.requested_active_power = deficit + grid_charge;
  const double covered_locally = demand - deficit;
  const double apparent =
      std::max(0.0, load_apparent + config.self_power - covered_locally) + grid_charge;
  out.grid.requested_apparent_power = std::max(apparent, out.grid.requested_active_power);

  if (charge > 0.0 || discharge > 0.0) {
    if (!(voltage > 0.0)) {
      throw DomainError("inverter: battery voltage must be > 0 V to set a current");
    }
    out.battery.mode = charge > 0.0 ? BatteryMode::Charge : BatteryMode::Discharge;
    out.battery.current = (charge > 0.0 ? charge : discharge) / voltage;
  }
  return out;
}

InverterPVFirst::InverterPVFirst(Clock clock, InverterPVFirstConfig config)
    : Inverter(clock), config_(config) {
  config_.validate();
}

InverterStepResult InverterPVFirst::step(std::int64_t step_ticks, const InverterStepInput& input) {
  const double dt = now().ticks_to_seconds(step_ticks);
  advance_clock(step_ticks);
  return inverter_pv_first_dispatch(config_, dt, input);
}

}  // namespace cemsim::models
