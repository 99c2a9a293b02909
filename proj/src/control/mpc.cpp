#include "cemsim/control/mpc.hpp"

#include <algorithm>
#include <utility>

#include <spdlog/spdlog.h>

#include "cemsim/errors.hpp"

namespace cemsim::control {

void RecedingHorizonConfig::validate() const {
  if (horizon_steps < 1) throw ConfigError("mpc: horizon must be at least one step");
  if (!(capacity > 0.0)) throw ConfigError("mpc: capacity must be > 0 J");
  if (!(0.0 <= soc_min && soc_min <= soc_max && soc_max <= 1.0)) {
    throw ConfigError("mpc: need 0 <= soc_min <= soc_max <= 1");
  }
  if (max_grid_power && !(*max_grid_power > 0.0)) {
    throw ConfigError("mpc: max_grid_power must be > 0 W");
  }
}

std::size_t window_steps(const RecedingHorizonConfig& config, Clock now, std::int64_t step_ticks) {
  std::size_t n = config.horizon_steps;
  if (config.run_end) {
    const std::int64_t left_ns = config.run_end->epoch_ns() - now.epoch_ns();
    const std::int64_t step_ns = now.ticks_to_ns(step_ticks);
    const auto whole = static_cast<std::size_t>(std::max<std::int64_t>(1, left_ns / step_ns));
    n = std::min(n, whole);
  }
  return std::max<std::size_t>(1, n);
}

RecedingHorizonDecision receding_horizon_step(const RecedingHorizonConfig& config,
                                              double step_seconds, double soc,
                                              const ForecastWindow& window,
                                              const std::vector<double>& prices) {
  if (window.load.empty()) throw DomainError("mpc: forecast window must contain at least one step");
  ChargingProblem problem;
  problem.step_seconds = step_seconds;
  problem.prices = prices;
  problem.load = window.load;
  problem.pv = window.pv;
  problem.capacity = config.capacity;
  problem.soc_min = config.soc_min;
  problem.soc_max = config.soc_max;
  problem.soc_initial = std::clamp(soc, config.soc_min, config.soc_max);
  problem.max_grid_power = config.max_grid_power;

  RecedingHorizonDecision decision;
  decision.window_steps = problem.steps();
  try {
    const ChargingPlan plan = solve_charging(problem);
    const double purchase = plan.grid_power.front();
    const double deficit = std::max(0.0, window.load.front() - window.pv.front());
    GridDirective directive;
    directive.grid_to_load_power = std::min(purchase, deficit);
    directive.grid_to_battery_power = purchase - directive.grid_to_load_power;
    decision.directive = directive;
    decision.planned_cost = plan.total_cost;
  } catch (const InfeasibleError& e) {
    spdlog::warn("mpc: {}; falling back to PV-first for this step", e.what());
  }
  return decision;
}

MpcInverter::MpcInverter(Clock clock, models::InverterPVFirstConfig inverter,
                         RecedingHorizonConfig control, models::PriceSchedule prices,
                         std::shared_ptr<ForecastProvider> forecasts)
    : Inverter(clock),
      inverter_(std::move(inverter)),
      control_(std::move(control)),
      prices_(std::move(prices)),
      forecasts_(std::move(forecasts)) {
  inverter_.validate();
  control_.validate();
  if (!forecasts_) throw ConfigError("mpc: a forecast provider is required");
}

InverterStepResult MpcInverter::step(std::int64_t step_ticks, const InverterStepInput& input) {
  const Clock start = now();
  const double dt = start.ticks_to_seconds(step_ticks);
  const std::size_t n = window_steps(control_, start, step_ticks);

  ForecastWindow window = forecasts_->forecast(start, step_ticks, n);
  if (window.load.size() != n || window.pv.size() != n) {
    throw DomainError("mpc: forecast provider returned a window of the wrong length");
  }
  window.load.front() = std::max(0.0, input.load.requested_active_power);
  window.pv.front() = std::max(0.0, input.power_source.power);
  // The plan balances the AC demand the inverter sees, self consumption included.
  for (double& w : window.load) w += inverter_.self_power;

  std::vector<double> prices(n);
  Clock t = start;
  for (std::size_t j = 0; j < n; ++j) {
    prices[j] = prices_.price_at(t);
    t = t.advance(step_ticks);
  }

  last_ = receding_horizon_step(control_, dt, input.battery.soc, window, prices);
  if (!last_.directive) ++fallbacks_;

  InverterStepInput directed = input;
  directed.directive = last_.directive;
  advance_clock(step_ticks);
  return models::inverter_pv_first_dispatch(inverter_, dt, directed);
}

}  // namespace cemsim::control
