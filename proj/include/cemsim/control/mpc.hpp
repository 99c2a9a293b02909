#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cemsim/components.hpp"
#include "cemsim/control/charging.hpp"
#include "cemsim/models/grid_priced.hpp"
#include "cemsim/models/inverter_pv_first.hpp"

namespace cemsim::control {

/// Per-step load and PV expectations. Element j describes the step that
/// starts at start + j * step and is sampled at its end, matching how the
/// simulated load and PV models report a step.
struct ForecastWindow {
  std::vector<double> load;  // W
  std::vector<double> pv;    // W
};

/// Opaque forecast source; the controller never looks at context itself.
class ForecastProvider {
 public:
  virtual ~ForecastProvider() = default;
  virtual ForecastWindow forecast(Clock start, std::int64_t step_ticks, std::size_t steps) = 0;
};

struct RecedingHorizonConfig {
  std::size_t horizon_steps = 720;
  double capacity = 0.0;  // J
  double soc_min = 0.0;
  double soc_max = 1.0;
  std::optional<double> max_grid_power;  // W
  /// Windows never extend past this time when set.
  std::optional<Clock> run_end;

  void validate() const;
};

struct RecedingHorizonDecision {
  std::optional<GridDirective> directive;  // empty after an infeasible window
  std::size_t window_steps = 0;
  double planned_cost = 0.0;
};

/// Solves the charging problem over `window` from `soc` and keeps only the
/// first step's purchase. The purchase covers this step's deficit first
/// (grid_to_load_power); the remainder charges the battery
/// (grid_to_battery_power). An infeasible window logs a warning and returns
/// no directive, which leaves the inverter on plain PV-first.
RecedingHorizonDecision receding_horizon_step(const RecedingHorizonConfig& config,
                                              double step_seconds, double soc,
                                              const ForecastWindow& window,
                                              const std::vector<double>& prices);

/// Window length for a step starting at `now`: the horizon, shortened to the
/// whole steps left before run_end (at least 1).
std::size_t window_steps(const RecedingHorizonConfig& config, Clock now, std::int64_t step_ticks);

/// PV-first inverter whose grid directive comes from a receding-horizon
/// controller. The window's first element is replaced by this step's
/// measured PV and load before solving.
class MpcInverter final : public Inverter {
 public:
  MpcInverter(Clock clock, models::InverterPVFirstConfig inverter, RecedingHorizonConfig control,
              models::PriceSchedule prices, std::shared_ptr<ForecastProvider> forecasts);

  InverterStepResult step(std::int64_t step_ticks, const InverterStepInput& input) override;
  std::string name() const override { return "inverter(mpc)"; }

  const RecedingHorizonDecision& last_decision() const noexcept { return last_; }
  std::size_t fallback_count() const noexcept { return fallbacks_; }

 private:
  models::InverterPVFirstConfig inverter_;
  RecedingHorizonConfig control_;
  models::PriceSchedule prices_;
  std::shared_ptr<ForecastProvider> forecasts_;
  RecedingHorizonDecision last_;
  std::size_t fallbacks_ = 0;
};

}  // namespace cemsim::control
