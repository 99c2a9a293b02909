#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace cemsim::control {

/// Lossless battery-charging program over a finite horizon of equal steps:
///
///   minimise   sum_t price_t * dt / 3.6e6 * grid_t
///   subject to grid_t >= 0 (and <= max_grid_power when set),
///              soc_{t+1} = soc_t + dt / C * (pv_used_t + grid_t - load_t),
///              0 <= pv_used_t <= pv_t,
///              soc_min <= soc_t <= soc_max for every t including the end.
///
/// PV that cannot be stored is curtailed at no cost.
struct ChargingProblem {
  double step_seconds = 3600.0;
  std::vector<double> prices;  // cost units / kWh, one per step
  std::vector<double> load;    // W
  std::vector<double> pv;      // W
  double capacity = 0.0;       // J
  double soc_min = 0.0;
  double soc_max = 1.0;
  double soc_initial = 0.0;
  std::optional<double> max_grid_power;  // W

  std::size_t steps() const noexcept { return prices.size(); }

  /// Throws DomainError on mismatched lengths, negative series, bad bounds or
  /// an initial SOC outside [soc_min, soc_max].
  void validate() const;
};

struct ChargingPlan {
  std::vector<double> grid_power;      // W per step
  std::vector<double> pv_curtailed;    // W per step
  std::vector<double> soc;             // steps + 1 values, soc[0] = initial
  std::vector<double> marginal_price;  // cost units / kWh; NaN when no supply remains
  double total_cost = 0.0;
  double purchased_energy = 0.0;  // J
};

/// Minimum-cost plan. Among optimal plans it buys the least energy and, for
/// equal prices, buys as late as possible.
///
/// Steps are processed in time order. Surplus PV fills the battery and is
/// curtailed once it is full. A shortfall at step t is bought at the cheapest
/// step s <= t whose purchase still fits under soc_max at every step between
/// s and t (and under the grid limit at s); repeated until covered.
///
/// Throws InfeasibleError naming the first step whose shortfall cannot be
/// bought.
ChargingPlan solve_charging(const ChargingProblem& problem);

/// CSV with header step,grid_power_w,pv_curtailed_w,soc,marginal_price.
void write_plan_csv(std::ostream& out, const ChargingPlan& plan);

}  // namespace cemsim::control
