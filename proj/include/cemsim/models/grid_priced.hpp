#pragma once

#include <optional>
#include <vector>

#include "cemsim/components.hpp"

namespace cemsim::models {

/// Piecewise-constant tariff in cost units per kWh over right-open intervals
/// [start_i, start_{i+1}).
class PriceSchedule {
 public:
  struct Breakpoint {
    Clock start;
    double price = 0.0;  // cost units / kWh
  };

  PriceSchedule() = default;
  /// Throws ConfigError unless starts strictly increase and prices are >= 0.
  explicit PriceSchedule(std::vector<Breakpoint> breakpoints);

  /// Two prices per day: `peak_price` in [peak_start_hour, peak_end_hour) UTC,
  /// `off_peak_price` otherwise, for `day_count` days from the UTC midnight
  /// at or before `first_day`.
  static PriceSchedule two_tier(Clock first_day, int day_count, double off_peak_price,
                                double peak_price, double peak_start_hour, double peak_end_hour);

  static PriceSchedule flat(Clock start, double price);

  /// Throws ConfigError for times before the first breakpoint.
  double price_at(Clock t) const;

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
  bool empty() const noexcept { return breakpoints_.empty(); }

  /// Same breakpoints with every price multiplied by `factor` (>= 0).
  PriceSchedule scaled(double factor) const;

 private:
  std::vector<Breakpoint> breakpoints_;
};

struct GridPricedConfig {
  std::optional<double> active_power_limit;    // W
  std::optional<double> apparent_power_limit;  // VA
  PriceSchedule prices;

  void validate() const;
};

/// Delivered = min(requested, limit) per power kind, violation when any
/// request exceeds its limit; cost = price(now) * dt * P_delivered / 3.6e6.
GridStepResult grid_priced_settle(const GridPricedConfig& config, double dt_s, Clock now,
                                  const GridStepInput& input);

class GridPriced final : public Grid {
 public:
  GridPriced(Clock clock, GridPricedConfig config);

  GridStepResult step(std::int64_t step_ticks, const GridStepInput& input) override;
  std::string name() const override { return "grid(priced)"; }

  const GridPricedConfig& config() const noexcept { return config_; }

 private:
  GridPricedConfig config_;
};

}  // namespace cemsim::models
