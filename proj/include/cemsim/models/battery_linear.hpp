#pragma once

#include "cemsim/components.hpp"

namespace cemsim::models {

struct BatteryLinearConfig {
  double capacity = 3.6e7;  // J (10 kWh)
  double eta_charge = 0.95;
  double eta_discharge = 0.95;
  double nominal_voltage = 51.2;  // V
  double initial_soc = 0.5;

  /// Throws ConfigError unless C > 0, eta in (0, 1], U_N > 0, SOC in [0, 1].
  void validate() const;
};

/// Unclamped energy change for one step: 0 when idle, dt*U*I*eta_c when
/// charging, -dt*U*I/eta_d when discharging.
double battery_linear_raw_delta(const BatteryLinearConfig& config, const BatteryStepInput& input,
                                double dt_s) noexcept;

/// Battery whose stored energy follows the linear update above, clamped to
/// [0, C]. The reported delta is the raw update, or the actual change when
/// the clamp engaged.
class BatteryLinear final : public Battery {
 public:
  BatteryLinear(Clock clock, BatteryLinearConfig config);

  BatteryStepResult step(std::int64_t step_ticks, const BatteryStepInput& input) override;
  BatteryStepResult observe() const override;
  std::string name() const override { return "battery(linear)"; }

  double energy() const noexcept { return energy_; }
  const BatteryLinearConfig& config() const noexcept { return config_; }

 private:
  BatteryLinearConfig config_;
  double energy_;
};

}  // namespace cemsim::models
