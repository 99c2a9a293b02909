#pragma once

// Step input/result records exchanged between components. Units are SI:
// V, A, W, VA, J, C. Energy signs: positive = absorbed by the battery.

#include <optional>
#include <string_view>

namespace cemsim {

struct PowerSourceStepResult {
  double voltage = 0.0;  // V
  double current = 0.0;  // A
  // Recorded separately from voltage * current; the two may disagree.
  double power = 0.0;  // W
};

struct GridStepInput {
  double requested_active_power = 0.0;    // W
  double requested_apparent_power = 0.0;  // VA
};

/// Extra outputs of grids that bill energy.
struct GridBilling {
  double cost = 0.0;  // cost units
  bool violation = false;
};

struct GridStepResult {
  double delivered_active_power = 0.0;    // W
  double delivered_apparent_power = 0.0;  // VA
  std::optional<GridBilling> billing;
};

struct LoadStepResult {
  double requested_active_power = 0.0;    // W
  double requested_apparent_power = 0.0;  // VA
};

enum class BatteryMode { Idle, Charge, Discharge };

std::string_view to_string(BatteryMode mode) noexcept;

struct BatteryStepInput {
  BatteryMode mode = BatteryMode::Idle;
  double current = 0.0;  // A, magnitude
};

struct BatteryStepResult {
  double soc = 0.0;           // [0, 1]
  double voltage = 0.0;       // V
  double current = 0.0;       // A, echo of the applied current magnitude
  double delta_energy = 0.0;  // J
  double delta_charge = 0.0;  // C, same sign as delta_energy
};

/// Grid power the controller wants the inverter to import on top of its
/// default dispatch.
struct GridDirective {
  // Imported and routed into the battery. Suppresses same-step discharge.
  double grid_to_battery_power = 0.0;  // W
  // Reserved to serve the load before the battery is asked to discharge.
  double grid_to_load_power = 0.0;  // W
};

struct InverterStepInput {
  PowerSourceStepResult power_source;
  BatteryStepResult battery;
  GridStepResult grid;
  LoadStepResult load;
  std::optional<GridDirective> directive;
};

struct InverterStepResult {
  GridStepInput grid;
  BatteryStepInput battery;
  double pv_power_drawn = 0.0;  // W, never above power_source.power
};

}  // namespace cemsim
