#pragma once

#include <limits>
#include <optional>

#include "cemsim/components.hpp"

namespace cemsim::models {

/// What the inverter knows about the attached battery's storage. When set,
/// charge and discharge are capped so that one step never carries SOC past
/// soc_max or soc_min.
struct StorageLimits {
  double capacity = 0.0;  // J
  double eta_charge = 1.0;
  double eta_discharge = 1.0;
};

struct InverterPVFirstConfig {
  double eta_pv_to_batt = 1.0;
  double eta_pv_to_load = 1.0;
  double eta_batt_to_load = 1.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double self_power = 0.0;  // W, added to the AC-side demand
  double max_charge_power = std::numeric_limits<double>::infinity();     // W, battery side
  double max_discharge_power = std::numeric_limits<double>::infinity();  // W, battery side
  std::optional<StorageLimits> storage;

  void validate() const;
};

/// One dispatch decision of the PV-first policy:
///   1. PV serves the demand (load + self consumption) through eta_pv_to_load.
///   2. PV surplus charges the battery through eta_pv_to_batt while SOC < soc_max.
///   3. A remaining deficit discharges the battery through eta_batt_to_load
///      while SOC > soc_min.
///   4. Whatever is left is requested from the grid.
/// A directive's grid_to_battery_power is added to the grid request and
/// routed into the battery after PV surplus; it suppresses step 3.
/// grid_to_load_power is served by the grid ahead of step 3.
InverterStepResult inverter_pv_first_dispatch(const InverterPVFirstConfig& config, double dt_s,
                                              const InverterStepInput& input);

class InverterPVFirst final : public Inverter {
 public:
  InverterPVFirst(Clock clock, InverterPVFirstConfig config);

  InverterStepResult step(std::int64_t step_ticks, const InverterStepInput& input) override;
  std::string name() const override { return "inverter(pv-first)"; }

  const InverterPVFirstConfig& config() const noexcept { return config_; }

 private:
  InverterPVFirstConfig config_;
};

}  // namespace cemsim::models
